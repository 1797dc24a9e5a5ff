#include "regpot/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <climits>
#include <cmath>
#include <functional>
#include <limits>

#include "regpot/error.hpp"
#include "regpot/io.hpp"
#include "regpot/regularize.hpp"
#include "regpot/stochastic.hpp"
#include "regpot/svg.hpp"

#ifndef REGPOT_VERSION
#define REGPOT_VERSION "unknown"
#endif

namespace fs = std::filesystem;

namespace regpot {
namespace {

CsvTable require(const fs::path& dir, const char* file, const char* producer) {
    const fs::path p = dir / file;
    if (!fs::exists(p))
        throw DependencyError("pipeline", std::string(file) + " not found in " + dir.string() + "; run '" + producer +
                                              "' first");
    return read_csv(p);
}

std::vector<double> node_index(int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = i + 1;
    return out;
}

std::vector<double> value_column(const fs::path& file, int n, const char* what) {
    const CsvTable t = read_csv(file);
    auto v = t.column("value");
    if (static_cast<int>(v.size()) != n)
        throw ValidationError("pipeline", std::string(what) + " file has " + std::to_string(v.size()) +
                                              " rows, expected " + std::to_string(n));
    return v;
}

std::vector<double> rhs_for(const ExperimentConfig& cfg, const Grid1D& grid) {
    if (cfg.rhs == "formula") return gen_random_rhs(grid, cfg.rhs_seed).values;
    if (cfg.rhs == "file") return value_column(cfg.rhs_file, grid.size(), "rhs");
    return std::vector<double>(static_cast<std::size_t>(grid.size()), 1.0);
}

std::string scale_column(double t) { return "vt_" + format_double(t); }

CsvTable residual_rows(const ResidualStage& s) {
    CsvTable table({"kind", "index", "t", "sup_norm", "weighted_norm", "identity_error"});
    auto add = [&](const char* kind, int index, const ResidualReport& r) {
        for (const auto& e : r.entries)
            table.add_row({kind, std::to_string(index), format_double(e.scale), format_double(e.sup_norm),
                           format_double(e.weighted_norm), format_double(e.identity_error)});
    };
    for (std::size_t i = 0; i < s.eigen.size(); ++i) add("eigen", static_cast<int>(i + 1), s.eigen[i]);
    add("landscape", 0, s.landscape);
    return table;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::string code_version() { return REGPOT_VERSION; }

std::vector<double> config_scales(const ExperimentConfig& cfg, const Potential& v) {
    if (cfg.t_policy == "inverse-mean") return {default_scale(v)};
    return cfg.ts;
}

// ---------------------------------------------------------------------------
// Loaders
// ---------------------------------------------------------------------------

Potential load_potential(const fs::path& dir) {
    const CsvTable t = require(dir, artifact::kPotential, "gen-potential");
    auto values = t.column("value");
    const Grid1D grid(static_cast<int>(values.size()));
    return Potential(grid, std::move(values), {"file", 0, 0, 0.0});
}

std::vector<EigenPair> load_eigenpairs(const fs::path& dir) {
    const CsvTable t = require(dir, artifact::kEigenpairs, "eigen");
    std::vector<EigenPair> pairs;
    for (std::size_t r = 0; r < t.rows(); ++r) {
        auto row = t.row_values(r);
        EigenPair p;
        p.index = static_cast<int>(row[0]);
        p.lambda = row[1];
        p.phi.assign(row.begin() + 2, row.end());
        pairs.push_back(std::move(p));
    }
    if (pairs.empty()) throw ValidationError("pipeline", "eigenpairs.csv holds no pairs");
    return pairs;
}

LandscapeSolution load_landscape(const fs::path& dir) {
    const CsvTable t = require(dir, artifact::kLandscape, "landscape");
    LandscapeSolution u;
    u.values = t.column("u");
    u.rhs.assign(u.values.size(), 1.0);
    return u;
}

RegularizeStage load_regularized(const fs::path& dir) {
    const CsvTable t = require(dir, artifact::kRegularized, "regularize");
    RegularizeStage s;
    for (const auto& name : t.header()) {
        if (!name.starts_with("vt_")) continue;
        s.scales.push_back(parse_double(std::string_view(name).substr(3)));
        s.fields.push_back(t.column(name));
    }
    if (s.scales.empty()) throw ValidationError("pipeline", "regularized.csv holds no scales");
    return s;
}

// ---------------------------------------------------------------------------
// Stages
// ---------------------------------------------------------------------------

Potential stage_potential(const ExperimentConfig& cfg, const fs::path& dir) {
    validate(cfg);
    const Grid1D grid(cfg.n);
    Potential v = cfg.potential == "file"
                      ? Potential(grid, value_column(cfg.potential_file, cfg.n, "potential"), {"file", 0, 0, 0.0})
                      : gen_piecewise_potential(grid, cfg.intervals, cfg.vmax, cfg.seed);
    const auto idx = node_index(cfg.n);
    const auto x = grid.nodes();
    write_csv(dir / artifact::kPotential, columns_table({"node", "x", "value"}, {idx, x, v.values()}));
    return v;
}

std::vector<EigenPair> stage_eigen(const ExperimentConfig& cfg, const fs::path& dir) {
    const Potential v = load_potential(dir);
    if (cfg.eigen_count > v.grid().size()) throw ValidationError("pipeline", "eigen_count exceeds n");
    auto pairs = lowest_eigenpairs(assemble_hamiltonian(v.grid(), v), cfg.eigen_count);
    std::vector<std::string> header = {"index", "lambda"};
    for (int i = 1; i <= v.grid().size(); ++i) header.push_back("phi_" + std::to_string(i));
    CsvTable table(std::move(header));
    for (const auto& p : pairs) {
        std::vector<double> row = {static_cast<double>(p.index), p.lambda};
        row.insert(row.end(), p.phi.begin(), p.phi.end());
        table.add_row(row);
    }
    write_csv(dir / artifact::kEigenpairs, table);
    return pairs;
}

LandscapeStage stage_landscape(const ExperimentConfig& cfg, const fs::path& dir) {
    const Potential v = load_potential(dir);
    const Grid1D& grid = v.grid();
    LandscapeStage s;
    s.u = landscape_function(v);
    s.v = generalized_landscape(v, rhs_for(cfg, grid));
    s.f_conv = convolve(s.v.rhs, sample_kernel(KernelSpec(1, cfg.generalized_scale), grid.spacing()), cfg.boundary);
    s.effective = generalized_effective_potential(s.v, cfg.generalized_scale, cfg.boundary);

    const auto idx = node_index(grid.size());
    const auto x = grid.nodes();
    const auto inv_u = inverse_landscape(s.u);
    write_csv(dir / artifact::kLandscape, columns_table({"node", "x", "u", "inv_u"}, {idx, x, s.u.values, inv_u}));

    std::vector<double> ratio(s.effective.size());
    for (std::size_t i = 0; i < ratio.size(); ++i) ratio[i] = 1.0 / s.effective[i];
    write_csv(dir / artifact::kGeneralized,
              columns_table({"node", "x", "f", "v", "f_conv", "effective", "ratio"},
                            {idx, x, s.v.rhs, s.v.values, s.f_conv, s.effective, ratio}));
    return s;
}

RegularizeStage stage_regularize(const ExperimentConfig& cfg, const fs::path& dir) {
    const Potential v = load_potential(dir);
    RegularizeStage s;
    s.scales = config_scales(cfg, v);
    for (double t : s.scales) s.fields.push_back(regularized_potential(v, t, cfg.boundary).values);

    std::vector<std::string> names = {"node", "x", "V"};
    for (double t : s.scales) names.push_back(scale_column(t));
    const auto idx = node_index(v.grid().size());
    const auto x = v.grid().nodes();
    std::vector<std::span<const double>> cols = {idx, x, v.values()};
    for (const auto& f : s.fields) cols.emplace_back(f);
    write_csv(dir / artifact::kRegularized, columns_table(std::move(names), cols));
    return s;
}

ResidualStage stage_residuals(const ExperimentConfig& cfg, const fs::path& dir) {
    const Potential v = load_potential(dir);
    const auto pairs = load_eigenpairs(dir);
    const auto u = load_landscape(dir);
    const auto ts = log_sweep(cfg.sweep_hi, cfg.sweep_lo, cfg.sweep_count);
    ResidualStage s;
    for (const auto& p : pairs) s.eigen.push_back(eigen_residual_sweep(p, v, ts, cfg.boundary));
    s.landscape = landscape_residual_sweep(u, v, ts, cfg.boundary);

    write_csv(dir / artifact::kResiduals, residual_rows(s));
    CsvTable slopes({"kind", "index", "slope", "weighted_slope"});
    for (std::size_t i = 0; i < s.eigen.size(); ++i)
        slopes.add_row({"eigen", std::to_string(i + 1), format_double(s.eigen[i].slope),
                        format_double(s.eigen[i].weighted_slope)});
    slopes.add_row(
        {"landscape", "0", format_double(s.landscape.slope), format_double(s.landscape.weighted_slope)});
    write_csv(dir / artifact::kSlopes, slopes);
    return s;
}

std::vector<EnvelopeComparison> stage_agmon(const ExperimentConfig&, const fs::path& dir) {
    const auto pairs = load_eigenpairs(dir);
    const auto u = load_landscape(dir);
    const auto reg = load_regularized(dir);
    const auto inv_u = inverse_landscape(u);
    const auto& vt = reg.fields.front();
    const Grid1D grid(static_cast<int>(u.values.size()));
    const double h = grid.spacing();

    std::vector<EnvelopeComparison> out;
    CsvTable env({"index", "lambda", "peak", "offset_inverse_landscape", "offset_regularized", "relative_difference",
                  "nodes_used"});
    for (const auto& p : pairs) {
        out.push_back(compare_envelopes(p, inv_u, vt, h));
        const auto& c = out.back();
        env.add_row({std::to_string(p.index), format_double(p.lambda), std::to_string(c.inverse_landscape.peak + 1),
                     format_double(c.inverse_landscape.offset), format_double(c.regularized.offset),
                     format_double(c.relative_difference), std::to_string(c.inverse_landscape.nodes_used)});
    }
    write_csv(dir / artifact::kEnvelopes, env);

    const auto& first = pairs.front();
    const int r0 = argmax_abs(first.phi);
    const auto rho_u = agmon_profile(inv_u, first.lambda, h, r0);
    const auto rho_t = agmon_profile(vt, first.lambda, h, r0);
    const auto idx = node_index(grid.size());
    const auto x = grid.nodes();
    write_csv(dir / artifact::kAgmon, columns_table({"node", "x", "rho_inverse_landscape", "rho_regularized"},
                                                    {idx, x, rho_u, rho_t}));
    return out;
}

MatchReport stage_predict(const ExperimentConfig& cfg, const fs::path& dir) {
    const Potential v = load_potential(dir);
    const auto pairs = load_eigenpairs(dir);
    const auto u = load_landscape(dir);
    const auto reg = load_regularized(dir);
    MatchReport rep = localization_match(pairs, u.values, reg.fields.front(), v.values(), cfg.match_tolerance,
                                         cfg.prominence);

    CsvTable m({"index", "peak_node", "dist_landscape", "dist_regularized", "dist_raw", "match_landscape",
                "match_regularized", "match_raw"});
    auto dist = [](int d) { return d == INT_MAX ? std::string("inf") : std::to_string(d); };
    for (const auto& r : rep.rows)
        m.add_row({std::to_string(r.eigen_index), std::to_string(r.peak_node + 1), dist(r.dist_landscape),
                   dist(r.dist_regularized), dist(r.dist_raw), r.match_landscape ? "1" : "0",
                   r.match_regularized ? "1" : "0", r.match_raw ? "1" : "0"});
    write_csv(dir / artifact::kMatches, m);

    CsvTable peaks({"field", "node", "prominence"});
    auto add = [&](const char* field, const PeakSet& s) {
        for (std::size_t i = 0; i < s.indices.size(); ++i)
            peaks.add_row({field, std::to_string(s.indices[i] + 1), format_double(s.prominences[i])});
    };
    add("landscape_maxima", rep.landscape_peaks);
    add("regularized_minima", rep.regularized_valleys);
    add("raw_minima", rep.raw_minima);
    write_csv(dir / artifact::kPeaks, peaks);
    return rep;
}

FeynmanKacStage stage_feynman_kac(const ExperimentConfig& cfg, const fs::path& dir, int threads, int dump_paths) {
    if (cfg.mc_paths <= 0) throw ValidationError("pipeline", "mc_paths must be positive for feynman-kac");
    if (dump_paths < 0 || dump_paths > 100) throw ValidationError("pipeline", "dump_paths must lie in [0, 100]");
    const Potential v = load_potential(dir);
    const auto pairs = load_eigenpairs(dir);
    const auto& first = pairs.front();

    FeynmanKacStage s;
    s.horizon = cfg.mc_horizon;
    s.node = argmax_abs(first.phi);
    PathConfig pc;
    pc.start = v.grid().node(s.node);
    pc.horizon = cfg.mc_horizon;
    pc.substeps = cfg.mc_substeps;
    pc.count = static_cast<std::size_t>(cfg.mc_paths);
    pc.seed = cfg.seed;
    const PathEnsemble paths(pc, threads);
    const auto check = fk_reproducing_check(first.phi, first.lambda, v, paths);
    s.target = check.target;
    s.estimate = check.estimate.mean;
    s.std_error = check.estimate.std_error;
    s.allowance = check.allowance;
    s.pass = check.pass;

    CsvTable t({"check", "node", "x", "t", "substeps", "paths", "estimate", "std_error", "target", "allowance",
                "pass"});
    t.add_row({"reproducing", std::to_string(s.node + 1), format_double(pc.start), format_double(pc.horizon),
               std::to_string(pc.substeps), std::to_string(pc.count), format_double(s.estimate),
               format_double(s.std_error), format_double(s.target), format_double(s.allowance), s.pass ? "1" : "0"});
    write_csv(dir / artifact::kFeynmanKac, t);

    if (dump_paths > 0) {
        CsvTable p({"path", "step", "time", "x"});
        const auto count = std::min<std::size_t>(static_cast<std::size_t>(dump_paths), paths.size());
        for (std::size_t i = 0; i < count; ++i)
            for (int k = 0; k <= paths.substeps(); ++k)
                p.add_row({std::to_string(i), std::to_string(k), format_double(k * paths.step()),
                           format_double(paths.position(i, k))});
        write_csv(dir / artifact::kPaths, p);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Gates and the full run
// ---------------------------------------------------------------------------

double landscape_bound_excess(const std::vector<EigenPair>& pairs, std::span<const double> u) {
    const double u_max = norm_inf(u);
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& p : pairs) {
        const double phi_max = norm_inf(p.phi);
        for (std::size_t i = 0; i < u.size(); ++i)
            worst = std::max(worst, (std::fabs(p.phi[i]) - p.lambda * u[i] * phi_max) / (p.lambda * u_max));
    }
    return worst;
}

int generalized_peak_distance(const LandscapeStage& s, double prominence_fraction) {
    std::vector<double> ratio(s.effective.size());
    for (std::size_t i = 0; i < ratio.size(); ++i) ratio[i] = 1.0 / s.effective[i];
    const auto rp = detect_peaks(ratio, PeakMode::Maxima, relative_prominence(ratio, prominence_fraction));
    const auto up = detect_peaks(s.u.values, PeakMode::Maxima, relative_prominence(s.u.values, prominence_fraction));
    const auto top_r = top_peaks(rp, 3);
    const auto top_u = top_peaks(up, 3);
    if (top_r.empty()) return INT_MAX;
    int worst = 0;
    for (int p : top_r) worst = std::max(worst, nearest_distance(p, top_u));
    return worst;
}

void mark_failed(const fs::path& dir, const std::string& message) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    write_file_atomic(dir / artifact::kFailed, message + "\n");
}

RunSummary run_pipeline(const ExperimentConfig& cfg, int threads, int dump_paths) {
    validate(cfg);
    const fs::path dir = cfg.output;
    fs::create_directories(dir);
    fs::remove(dir / artifact::kFailed);

    std::vector<std::pair<std::string, double>> wall;
    auto timed = [&](const char* name, auto&& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        auto r = fn();
        wall.emplace_back(name, seconds_since(t0));
        return r;
    };

    RunSummary summary;
    try {
        const Potential v = timed("gen-potential", [&] { return stage_potential(cfg, dir); });
        const auto pairs = timed("eigen", [&] { return stage_eigen(cfg, dir); });
        const auto land = timed("landscape", [&] { return stage_landscape(cfg, dir); });
        timed("regularize", [&] { return stage_regularize(cfg, dir); });
        const auto res = timed("residuals", [&] { return stage_residuals(cfg, dir); });
        timed("agmon", [&] { return stage_agmon(cfg, dir); });
        const auto match = timed("predict", [&] { return stage_predict(cfg, dir); });
        FeynmanKacStage fk;
        if (cfg.mc_paths > 0)
            fk = timed("feynman-kac", [&] { return stage_feynman_kac(cfg, dir, threads, dump_paths); });

        auto gate = [&](const char* name, bool pass, double value, double threshold, std::string detail) {
            if (cfg.gate_enabled(name)) summary.gates.push_back({name, pass, value, threshold, std::move(detail)});
        };

        double identity = 0.0;
        for (const auto& r : res.eigen)
            for (const auto& e : r.entries) identity = std::max(identity, e.identity_error);
        for (const auto& e : res.landscape.entries) identity = std::max(identity, e.identity_error);
        gate("identity", identity <= 1e-10, identity, 1e-10, "max relative residual identity error");

        const double excess = landscape_bound_excess(pairs, land.u.values);
        gate("landscape-bound", excess <= 1e-8, excess, 1e-8, "max (|phi| - lambda u ||phi||) / (lambda ||u||)");

        const std::size_t lead = std::min<std::size_t>(3, match.rows.size());
        int worst = 0;
        for (std::size_t i = 0; i < lead; ++i)
            worst = std::max({worst, match.rows[i].dist_landscape, match.rows[i].dist_regularized});
        const bool counts = match.regularized_matches >= match.raw_matches;
        gate("localization", worst <= cfg.match_tolerance && counts, worst, cfg.match_tolerance,
             "worst node distance of the leading eigenfunctions; regularized matches " +
                 std::to_string(match.regularized_matches) + " vs raw " + std::to_string(match.raw_matches));

        const int gdist = generalized_peak_distance(land, cfg.prominence);
        gate("generalized", gdist <= cfg.match_tolerance, gdist, cfg.match_tolerance,
             "worst node distance of top v/(f*k_t) peaks to top u peaks");

        if (cfg.mc_paths > 0)
            gate("feynman-kac", fk.pass, std::fabs(fk.estimate - fk.target), 3.0 * fk.std_error + fk.allowance,
                 "reproducing formula at the first eigenfunction's peak");

        summary.pass = std::all_of(summary.gates.begin(), summary.gates.end(), [](const auto& g) { return g.pass; });
        CsvTable gates({"gate", "pass", "value", "threshold", "detail"});
        for (const auto& g : summary.gates)
            gates.add_row({g.name, g.pass ? "1" : "0", format_double(g.value), format_double(g.threshold), g.detail});
        write_csv(dir / artifact::kGates, gates);

    } catch (const std::exception& e) {
        mark_failed(dir, e.what());
        throw;
    }

    std::string manifest = serialize_config(cfg);
    manifest += "manifest.version = " + code_version() + "\n";
    manifest += "manifest.threads = " + std::to_string(threads) + "\n";
    for (const auto& [name, secs] : wall) manifest += "manifest.wall_seconds." + name + " = " + format_double(secs) + "\n";
    for (const auto& g : summary.gates) manifest += "manifest.gate." + g.name + " = " + (g.pass ? "pass" : "fail") + "\n";
    manifest += std::string("manifest.status = ") + (summary.pass ? "pass" : "fail") + "\n";
    write_file_atomic(dir / artifact::kManifest, manifest);
    try {
        stage_report(cfg, dir);
    } catch (const std::exception& e) {
        mark_failed(dir, e.what());
        throw;
    }
    return summary;
}

}  // namespace regpot
