// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "regpot/analysis.hpp"
#include "regpot/io.hpp"
#include "regpot/kernel.hpp"
#include "regpot/pipeline.hpp"
#include "regpot/quadrature.hpp"
#include "regpot/stochastic.hpp"

using namespace regpot;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [FAIL]");
    }
};

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

const Grid1D kGrid(3000);

Potential seeded(std::uint64_t seed) { return gen_piecewise_potential(kGrid, 20, 1e5, seed); }

// ---------------------------------------------------------------------------

Outcome kernel_correctness() {
    Outcome out;
    double worst = 0.0;
    for (int d : {1, 2})
        for (double t : {1e-4, 1e-2, 1.0})
            for (double q = 0.01; q <= 20.0001; q *= 1.1) {
                const KernelSpec spec(d, t);
                const double r = q * std::sqrt(t);
                const double closed = eval_kernel(spec, r);
                const double quad = eval_kernel_quadrature(spec, r, 1e-12 * std::max(1.0, closed));
                worst = std::max(worst, std::fabs(closed - quad) / std::max(1.0, closed));
            }
    out.require(worst <= 1e-10, "closed vs quadrature " + fmt(worst));

    const double t = 0.01, s = std::sqrt(t);
    auto radial = [&](int d, double pref) {
        const KernelSpec spec(d, t);
        return oracle::simpson(
            [&](double u) {
                const double r = s * std::exp(u);
                return pref * std::pow(r, d - 1) * eval_kernel(spec, r) * r;
            },
            std::log(1e-8), std::log(30.0), 6000);
    };
    const double m1 = 2.0 * oracle::simpson([&](double r) { return eval_kernel({1, t}, r); }, 0.0, 30.0 * s, 20000);
    const double m2 = radial(2, 2.0 * oracle::pi);
    const double m3 = radial(3, 4.0 * oracle::pi);
    const double mass = std::max({std::fabs(m1 - 1), std::fabs(m2 - 1), std::fabs(m3 - 1)});
    out.require(mass <= 1e-6, "mass error " + fmt(mass));
    const double second =
        2.0 * oracle::simpson([&](double r) { return r * r * eval_kernel({1, t}, r); }, 0.0, 30.0 * s, 20000);
    out.require(std::fabs(second - t) <= 1e-6, "second moment error " + fmt(std::fabs(second - t)));
    return out;
}

Outcome residual_identities() {
    Outcome out;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Potential v = seeded(seed);
        const auto pairs = lowest_eigenpairs(assemble_hamiltonian(kGrid, v), 5);
        const auto u = landscape_function(v);
        for (double t : {1e-3, 1e-4, 1e-5}) {
            const auto window = interior_window(kGrid, t);
            for (const auto& p : pairs) worst = std::max(worst, thm1_residual(p, v, t, window).identity_error);
            worst = std::max(worst, thm2_residual(u, v, t, window).identity_error);
        }
    }
    out.require(worst <= 1e-10, "max relative identity error " + fmt(worst) + " over 10 seeds");
    return out;
}

Outcome smooth_rate() {
    Outcome out;
    const Potential v = sample_potential(kGrid, [](double x) { return 1e3 * std::pow(std::sin(2 * oracle::pi * x), 2); });
    const auto pair = lowest_eigenpairs(assemble_hamiltonian(kGrid, v), 1)[0];
    const auto rep = eigen_residual_sweep(pair, v, log_sweep(1e-4, 1e-6, 9));
    out.require(rep.slope >= 0.8 && rep.slope <= 1.2, "sup-residual slope " + fmt(rep.slope));

    // Unit amplitude so that (t/2) V''(1/4) = -4 pi^2 t; node 999 of 3999 is x = 1/4.
    const Grid1D g(3999);
    const Potential unit = sample_potential(g, [](double x) { return std::pow(std::sin(2 * oracle::pi * x), 2); });
    const double t = 1e-4;
    const double diff = regularized_potential(unit, t).values[999] - unit[999];
    const double expect = -4.0 * oracle::pi * oracle::pi * t;
    out.require(std::fabs(diff - expect) <= 0.05 * std::fabs(expect),
                "(V_t - V)(1/4) = " + fmt(diff) + " vs " + fmt(expect));
    return out;
}

Outcome rough_rate() {
    Outcome out;
    const Grid1D g(2999);  // node 1499 is x = 1/2
    const auto ts = log_sweep(1e-3, 1e-6, 10);
    for (double alpha : {0.5, 1.0}) {
        const Potential v = sample_potential(g, [&](double x) { return std::pow(std::fabs(x - 0.5), alpha); });
        std::vector<double> err;
        for (double t : ts) err.push_back(std::fabs(regularized_potential(v, t).values[1499] - v[1499]));
        const double slope = loglog_slope(ts, err);
        out.require(std::fabs(slope - alpha / 2) <= 0.05, "alpha " + fmt(alpha) + " slope " + fmt(slope));
    }
    const Grid1D gs(3999);
    const Potential smooth = sample_potential(gs, [](double x) { return 1e3 * std::pow(std::sin(2 * oracle::pi * x), 2); });
    const auto tk = log_sweep(1e-4, 1e-6, 9);
    std::vector<double> diff;
    for (double t : tk) diff.push_back(std::fabs(kernel_comparison(smooth, 999, t)));
    const double slope = loglog_slope(tk, diff);
    out.require(std::fabs(slope - 1.0) <= 0.2, "k_t vs Gaussian slope " + fmt(slope));
    return out;
}

Outcome feynman_kac() {
    Outcome out;
    const Potential zero(kGrid, std::vector<double>(3000, 0.0));
    std::vector<double> sine(3000);
    for (int i = 0; i < 3000; ++i) sine[static_cast<std::size_t>(i)] = std::sin(oracle::pi * kGrid.node(i));
    const auto free_paths = sample_paths(0.5, 0.01, 64, 100000, 1);
    const auto bare = fk_reproducing_check(sine, 0.0, zero, free_paths);
    const double factor = std::exp(-oracle::pi * oracle::pi * 0.01);
    out.require(std::fabs(bare.estimate.mean - factor) <= 3 * bare.estimate.std_error,
                "E sin(pi w_t) = " + fmt(bare.estimate.mean) + " vs " + fmt(factor));
    const auto free_check = fk_reproducing_check(sine, oracle::pi * oracle::pi, zero, free_paths);
    out.require(free_check.pass, "sine reproducing " + fmt(free_check.estimate.mean));

    const Potential v = seeded(7);
    const auto pair = lowest_eigenpairs(assemble_hamiltonian(kGrid, v), 1)[0];
    const int peak = argmax_abs(pair.phi);
    const auto check = fk_reproducing_check(pair.phi, pair.lambda, v, sample_paths(kGrid.node(peak), 1e-5, 64, 100000, 2));
    out.require(check.pass, "seeded phi_1 " + fmt(check.estimate.mean) + " vs " + fmt(check.target));

    int avg_pass = 0;
    for (int node : {600, 1100, 1499, 2000, 2400}) {
        const auto paths = sample_paths(kGrid.node(node), 1e-4, 64, 100000, 10 + static_cast<std::uint64_t>(node));
        avg_pass += avg_potential_check(v, node, paths).pass;
    }
    out.require(avg_pass == 5, "avg_potential " + std::to_string(avg_pass) + "/5 nodes");

    const auto scalar = khasminskii_constant(10.0, 0.05);
    out.require(scalar.exact <= scalar.bound, "e^0.5 = " + fmt(scalar.exact) + " <= " + fmt(scalar.bound));
    PathConfig budget;
    budget.count = 100000;
    budget.seed = 3;
    const std::vector<int> nodes = {300, 900, 1500, 2100, 2700};
    const auto kh = khasminskii_check(v, scale_for_alpha(v, 0.3), nodes, budget, 4);
    out.require(kh.precondition_met && kh.pass, "Khasminskii " + fmt(kh.mc_sup) + " <= " + fmt(kh.bound));
    return out;
}

Outcome second_order() {
    Outcome out;
    double worst = 0.0;
    for (double c : {1.0, 1e3, 1e5})
        for (double t : {1e-5, 1e-4}) {
            const Potential v(kGrid, std::vector<double>(3000, c));
            worst = std::max(worst, std::fabs(second_order_term(v, 1500, t) / (c * c * t * t) - 1.0));
        }
    out.require(worst <= 1e-8, "constant V relative error " + fmt(worst));
    const auto check = second_moment_check(seeded(7), 1499, sample_paths(kGrid.node(1499), 1e-5, 64, 100000, 4));
    out.require(check.pass, "MC " + fmt(check.estimate.mean) + " vs " + fmt(check.reference) + " (sigma " +
                                fmt(check.estimate.std_error) + ")");
    return out;
}

Outcome landscape_bound() {
    Outcome out;
    double worst = -1.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Potential v = seeded(seed);
        const auto pairs = lowest_eigenpairs(assemble_hamiltonian(kGrid, v), 5);
        worst = std::max(worst, landscape_bound_excess(pairs, landscape_function(v).values));
    }
    out.require(worst <= 1e-8, "max relative excess " + fmt(worst) + " over 10 seeds");
    return out;
}

Outcome figure_reproduction() {
    Outcome out;
    auto score = [](std::uint64_t seed) {
        const Potential v = seeded(seed);
        const auto pairs = lowest_eigenpairs(assemble_hamiltonian(kGrid, v), 5);
        const auto u = landscape_function(v);
        const auto r = localization_match(pairs, u.values, regularized_potential(v, 1e-3).values, v.vector(), 60);
        bool ok = r.regularized_matches >= r.raw_matches;
        for (int k = 0; k < 3; ++k) ok = ok && r.rows[static_cast<std::size_t>(k)].match_landscape &&
                                        r.rows[static_cast<std::size_t>(k)].match_regularized;
        return std::pair{ok, r};
    };
    const auto [ok, r] = score(7);
    std::string d;
    for (int k = 0; k < 3; ++k)
        d += (k ? "," : "") + std::to_string(r.rows[static_cast<std::size_t>(k)].dist_landscape) + "/" +
             std::to_string(r.rows[static_cast<std::size_t>(k)].dist_regularized);
    out.require(ok, "seed 7 u/V_t distances " + d + ", V_t matches " + std::to_string(r.regularized_matches) +
                         " vs raw " + std::to_string(r.raw_matches));
    int ensemble = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) ensemble += score(seed).first;
    out.detail += "; informational: " + std::to_string(ensemble) + "/20 seeds satisfy all conditions";
    return out;
}

Outcome generalized() {
    Outcome out;
    const fs::path dir = fs::temp_directory_path() / "regpot-acceptance-generalized";
    fs::remove_all(dir);
    ExperimentConfig cfg;
    cfg.rhs = "formula";
    cfg.generalized_scale = 1e-3;
    cfg.output = dir.string();
    stage_potential(cfg, dir);
    const auto stage = stage_landscape(cfg, dir);
    const int dist = generalized_peak_distance(stage, cfg.prominence);
    out.require(dist <= 60, "top-3 peak distance " + std::to_string(dist) + " nodes");

    const Potential v = seeded(cfg.seed);
    const auto u = landscape_function(v);
    const auto eff = generalized_effective_potential(u, 1e-3, BoundaryPolicy::Reflect);
    const auto inv = inverse_landscape(u);
    out.require(eff == inv, "constant f reproduces 1/u exactly");
    return out;
}

Outcome determinism() {
    Outcome out;
    const fs::path base = fs::temp_directory_path() / "regpot-acceptance-determinism";
    fs::remove_all(base);
    ExperimentConfig cfg;
    cfg.rhs = "formula";
    cfg.mc_paths = 20000;
    cfg.gates = {"identity", "landscape-bound", "localization", "generalized", "feynman-kac"};
    cfg.output = (base / "a").string();
    run_pipeline(cfg, 1);
    cfg.output = (base / "b").string();
    run_pipeline(cfg, 4);
    int files = 0, same = 0;
    for (const auto& e : fs::directory_iterator(base / "a")) {
        if (e.path().extension() != ".csv") continue;
        ++files;
        const fs::path other = base / "b" / e.path().filename();
        same += fs::exists(other) && read_file(e.path()) == read_file(other);
    }
    out.require(files > 0 && same == files, std::to_string(same) + "/" + std::to_string(files) +
                                                " CSV files byte-identical (1 vs 4 threads)");
    return out;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"kernel correctness", kernel_correctness},
        {"exact residual identities", residual_identities},
        {"smooth-potential O(t) rate", smooth_rate},
        {"rough-potential rates", rough_rate},
        {"Feynman-Kac gates", feynman_kac},
        {"second-order expansion", second_order},
        {"landscape bound", landscape_bound},
        {"seeded localization", figure_reproduction},
        {"generalized landscape", generalized},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failures += !o.pass;
        std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
