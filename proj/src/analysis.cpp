#include "regpot/analysis.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <limits>
#include <numeric>

#include "regpot/error.hpp"

namespace regpot {

namespace {

struct ResidualInputs {
    std::span<const double> solution;  // phi or u
    std::span<const double> source;    // lambda phi or f, pointwise
    double source_scale = 0.0;
};

ResidualEntry residual_entry(const Potential& v, const ResidualInputs& in, double t, std::span<const std::uint8_t> window,
                             BoundaryPolicy policy) {
    const Grid1D& grid = v.grid();
    const int n = grid.size();
    if (static_cast<int>(in.solution.size()) != n || static_cast<int>(window.size()) != n)
        throw ValidationError("analysis", "residual inputs live on different grids");
    const auto vt = regularized_potential(v, t, policy).values;
    const auto lap = apply_negative_laplacian(grid, in.solution);

    const double term_scale =
        norm_inf(lap) + (v.max() + in.source_scale) * norm_inf(in.solution) + norm_inf(in.source);
    ResidualEntry e;
    e.scale = t;
    double weighted_num = 0.0, weighted_den = 0.0;
    bool any = false;
    for (int i = 0; i < n; ++i) {
        if (!window[static_cast<std::size_t>(i)]) continue;
        any = true;
        const auto k = static_cast<std::size_t>(i);
        const double w = in.solution[k];
        const double r = lap[k] + vt[k] * w - in.source[k];
        const double predicted = (vt[k] - v[i]) * w;
        e.sup_norm = std::max(e.sup_norm, std::fabs(r));
        e.identity_error = std::max(e.identity_error, std::fabs(r - predicted));
        weighted_num += std::fabs(r) * std::fabs(w);
        weighted_den += w * w;
    }
    if (!any) throw ValidationError("analysis", "interior window is empty");
    e.identity_error = term_scale > 0.0 ? e.identity_error / term_scale : e.identity_error;
    e.weighted_norm = weighted_den > 0.0 ? weighted_num / weighted_den : 0.0;
    return e;
}

template <class EntryFn>
ResidualReport sweep(const Grid1D& grid, std::vector<double> ts, EntryFn entry) {
    if (ts.empty()) throw ValidationError("analysis", "empty t sweep");
    std::sort(ts.begin(), ts.end(), std::greater<>());
    if (std::adjacent_find(ts.begin(), ts.end()) != ts.end())
        throw ValidationError("analysis", "t values must be distinct");
    ResidualReport rep;
    rep.window = interior_window(grid, ts.front());
    for (double t : ts) rep.entries.push_back(entry(t, rep.window));
    if (ts.size() >= 5) {
        std::vector<double> sup, weighted;
        for (const auto& e : rep.entries) {
            sup.push_back(e.sup_norm);
            weighted.push_back(e.weighted_norm);
        }
        auto positive = [](const std::vector<double>& y) {
            return std::all_of(y.begin(), y.end(), [](double x) { return x > 0.0; });
        };
        rep.slope = positive(sup) ? loglog_slope(ts, sup) : std::nan("");
        rep.weighted_slope = positive(weighted) ? loglog_slope(ts, weighted) : std::nan("");
    } else {
        rep.slope = rep.weighted_slope = std::nan("");
    }
    return rep;
}

}  // namespace

std::vector<std::uint8_t> interior_window(const Grid1D& grid, double t) {
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(grid.size()));
    const double margin = 5.0 * std::sqrt(t);
    bool any = false;
    for (int i = 0; i < grid.size(); ++i) {
        const bool inside = grid.boundary_distance(i) >= margin;
        mask[static_cast<std::size_t>(i)] = inside ? 1 : 0;
        any = any || inside;
    }
    if (!any) throw ValidationError("analysis", "interior window empty: t too large for the domain");
    return mask;
}

ResidualEntry thm1_residual(const EigenPair& pair, const Potential& v, double t, std::span<const std::uint8_t> window,
                            BoundaryPolicy policy) {
    std::vector<double> source(pair.phi.size());
    for (std::size_t i = 0; i < source.size(); ++i) source[i] = pair.lambda * pair.phi[i];
    return residual_entry(v, {pair.phi, source, std::fabs(pair.lambda)}, t, window, policy);
}

ResidualEntry thm2_residual(const LandscapeSolution& u, const Potential& v, double t, std::span<const std::uint8_t> window,
                            BoundaryPolicy policy) {
    return residual_entry(v, {u.values, u.rhs, 0.0}, t, window, policy);
}

ResidualReport eigen_residual_sweep(const EigenPair& pair, const Potential& v, std::vector<double> ts,
                                    BoundaryPolicy policy) {
    return sweep(v.grid(), std::move(ts), [&](double t, std::span<const std::uint8_t> window) {
        return thm1_residual(pair, v, t, window, policy);
    });
}

ResidualReport landscape_residual_sweep(const LandscapeSolution& u, const Potential& v, std::vector<double> ts,
                                        BoundaryPolicy policy) {
    return sweep(v.grid(), std::move(ts), [&](double t, std::span<const std::uint8_t> window) {
        return thm2_residual(u, v, t, window, policy);
    });
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ValidationError("analysis", "slope inputs differ in length");
    if (x.size() < 5) throw ValidationError("analysis", "slope estimation needs at least 5 points");
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("analysis", "log-log slope needs positive data");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    return sxy / sxx;
}

std::vector<double> log_sweep(double hi, double lo, int n) {
    if (n < 2 || !(hi > lo) || !(lo > 0.0)) throw ValidationError("analysis", "invalid log sweep");
    std::vector<double> out(static_cast<std::size_t>(n));
    const double a = std::log(hi), b = std::log(lo);
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
    out.front() = hi;
    out.back() = lo;
    return out;
}

double kernel_comparison(const Potential& v, int node, double t, BoundaryPolicy policy) {
    const double h = v.grid().spacing();
    const KernelSpec spec(1, t);
    const double with_k = convolve_at(v.values(), sample_kernel(spec, h), policy, node);
    const double with_g = convolve_at(v.values(), sample_gaussian(spec, h), policy, node);
    return with_k - with_g;
}

std::vector<double> agmon_profile(std::span<const double> w, double lambda, double h, int r0) {
    const int n = static_cast<int>(w.size());
    if (r0 < 0 || r0 >= n) throw ValidationError("analysis", "Agmon base node out of range");
    std::vector<double> root(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) root[i] = std::sqrt(std::max(0.0, w[i] - lambda));
    std::vector<double> rho(w.size(), 0.0);
    for (int i = r0 + 1; i < n; ++i)
        rho[static_cast<std::size_t>(i)] =
            rho[static_cast<std::size_t>(i - 1)] + 0.5 * h * (root[static_cast<std::size_t>(i - 1)] + root[static_cast<std::size_t>(i)]);
    for (int i = r0 - 1; i >= 0; --i)
        rho[static_cast<std::size_t>(i)] =
            rho[static_cast<std::size_t>(i + 1)] + 0.5 * h * (root[static_cast<std::size_t>(i + 1)] + root[static_cast<std::size_t>(i)]);
    return rho;
}

double agmon_distance(std::span<const double> w, double lambda, double h, int r0, int r) {
    const int n = static_cast<int>(w.size());
    if (r0 < 0 || r0 >= n || r < 0 || r >= n) throw ValidationError("analysis", "Agmon node out of range");
    const int lo = std::min(r0, r), hi = std::max(r0, r);
    double s = 0.0;
    for (int i = lo; i < hi; ++i) {
        const double a = std::sqrt(std::max(0.0, w[static_cast<std::size_t>(i)] - lambda));
        const double b = std::sqrt(std::max(0.0, w[static_cast<std::size_t>(i + 1)] - lambda));
        s += 0.5 * h * (a + b);
    }
    return s;
}

int argmax_abs(std::span<const double> v) {
    int arg = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i)
        if (std::fabs(v[static_cast<std::size_t>(i)]) > std::fabs(v[static_cast<std::size_t>(arg)])) arg = i;
    return arg;
}

EnvelopeReport decay_envelope_check(std::span<const double> phi, std::span<const double> w, double lambda, double h) {
    if (phi.size() != w.size()) throw ValidationError("analysis", "envelope inputs differ in length");
    EnvelopeReport rep;
    rep.peak = argmax_abs(phi);
    const double peak = std::fabs(phi[static_cast<std::size_t>(rep.peak)]);
    const auto rho = agmon_profile(w, lambda, h, rep.peak);
    const double floor = 1e-12 * peak;
    rep.offset = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> used;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        if (std::fabs(phi[i]) <= floor) continue;
        used.push_back(i);
        rep.offset = std::max(rep.offset, std::log(std::fabs(phi[i])) + rho[i]);
    }
    rep.nodes_used = static_cast<int>(used.size());
    std::size_t violations = 0;
    for (std::size_t i : used)
        if (std::log(std::fabs(phi[i])) > -rho[i] + rep.offset + 1e-12) ++violations;
    rep.violation_fraction = used.empty() ? 0.0 : static_cast<double>(violations) / static_cast<double>(used.size());
    return rep;
}

EnvelopeComparison compare_envelopes(const EigenPair& pair, std::span<const double> inverse_u,
                                     std::span<const double> vt, double h) {
    EnvelopeComparison c;
    c.inverse_landscape = decay_envelope_check(pair.phi, inverse_u, pair.lambda, h);
    c.regularized = decay_envelope_check(pair.phi, vt, pair.lambda, h);
    const double a = c.inverse_landscape.offset, b = c.regularized.offset;
    const double denom = std::max(std::fabs(a), std::fabs(b));
    c.relative_difference = denom > 0.0 ? std::fabs(a - b) / denom : 0.0;
    return c;
}

PeakSet detect_peaks(std::span<const double> field, PeakMode mode, double prominence) {
    if (!(prominence > 0.0)) throw ValidationError("analysis", "prominence must be positive");
    const int n = static_cast<int>(field.size());
    std::vector<double> x(field.begin(), field.end());
    if (mode == PeakMode::Minima)
        for (double& v : x) v = -v;

    PeakSet out;
    out.prominence = prominence;
    int i = 1;
    while (i < n - 1) {
        if (x[static_cast<std::size_t>(i - 1)] < x[static_cast<std::size_t>(i)]) {
            int ahead = i + 1;
            while (ahead < n - 1 && x[static_cast<std::size_t>(ahead)] == x[static_cast<std::size_t>(i)]) ++ahead;
            if (x[static_cast<std::size_t>(ahead)] < x[static_cast<std::size_t>(i)]) {
                const int peak = (i + ahead - 1) / 2;
                const double height = x[static_cast<std::size_t>(i)];
                double left_min = height;
                for (int j = i; j >= 0 && x[static_cast<std::size_t>(j)] <= height; --j)
                    left_min = std::min(left_min, x[static_cast<std::size_t>(j)]);
                double right_min = height;
                for (int j = ahead - 1; j < n && x[static_cast<std::size_t>(j)] <= height; ++j)
                    right_min = std::min(right_min, x[static_cast<std::size_t>(j)]);
                const double prom = height - std::max(left_min, right_min);
                if (prom >= prominence) {
                    out.indices.push_back(peak);
                    out.prominences.push_back(prom);
                }
                i = ahead;
                continue;
            }
        }
        ++i;
    }
    return out;
}

double relative_prominence(std::span<const double> field, double fraction) {
    const auto [lo, hi] = std::minmax_element(field.begin(), field.end());
    const double range = *hi - *lo;
    return range > 0.0 ? fraction * range : std::numeric_limits<double>::min();
}

std::vector<int> top_peaks(const PeakSet& peaks, int k) {
    std::vector<std::size_t> order(peaks.indices.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return peaks.prominences[a] > peaks.prominences[b]; });
    std::vector<int> out;
    for (std::size_t j = 0; j < order.size() && static_cast<int>(out.size()) < k; ++j)
        out.push_back(peaks.indices[order[j]]);
    std::sort(out.begin(), out.end());
    return out;
}

int nearest_distance(int index, std::span<const int> targets) {
    int best = INT_MAX;
    for (int t : targets) best = std::min(best, std::abs(t - index));
    return best;
}

MatchReport localization_match(std::span<const EigenPair> pairs, std::span<const double> u, std::span<const double> vt,
                               std::span<const double> v, int tolerance_nodes, double prominence_fraction) {
    if (pairs.empty()) throw ValidationError("analysis", "localization match needs at least one eigenpair");
    MatchReport rep;
    rep.tolerance = tolerance_nodes;
    rep.landscape_peaks = detect_peaks(u, PeakMode::Maxima, relative_prominence(u, prominence_fraction));
    rep.regularized_valleys = detect_peaks(vt, PeakMode::Minima, relative_prominence(vt, prominence_fraction));
    rep.raw_minima = detect_peaks(v, PeakMode::Minima, relative_prominence(v, prominence_fraction));
    for (const auto& pair : pairs) {
        MatchRow row;
        row.eigen_index = pair.index;
        row.peak_node = argmax_abs(pair.phi);
        row.dist_landscape = nearest_distance(row.peak_node, rep.landscape_peaks.indices);
        row.dist_regularized = nearest_distance(row.peak_node, rep.regularized_valleys.indices);
        row.dist_raw = nearest_distance(row.peak_node, rep.raw_minima.indices);
        row.match_landscape = row.dist_landscape <= tolerance_nodes;
        row.match_regularized = row.dist_regularized <= tolerance_nodes;
        row.match_raw = row.dist_raw <= tolerance_nodes;
        rep.landscape_matches += row.match_landscape ? 1 : 0;
        rep.regularized_matches += row.match_regularized ? 1 : 0;
        rep.raw_matches += row.match_raw ? 1 : 0;
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace regpot
