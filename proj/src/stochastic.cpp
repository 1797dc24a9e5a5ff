#include "regpot/stochastic.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <functional>
#include <thread>

#include "regpot/error.hpp"
#include "regpot/regularize.hpp"
#include "regpot/rng.hpp"

namespace regpot {

namespace {

double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 16) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

// Run body(begin, end) over [0, count) split into contiguous chunks.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t, std::size_t)>& body) {
    workers = std::max(1, workers);
    if (workers == 1 || count < 1024) {
        body(0, count);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (count + static_cast<std::size_t>(workers) - 1) / static_cast<std::size_t>(workers);
    for (std::size_t begin = 0; begin < count; begin += chunk)
        pool.emplace_back(body, begin, std::min(count, begin + chunk));
    for (auto& th : pool) th.join();
}

template <class Sample>
MCEstimate estimate_paths(const PathEnsemble& paths, Sample sample) {
    std::vector<double> values(paths.size());
    parallel_for(paths.size(), paths.workers(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) values[p] = sample(p);
    });
    return estimate_from_samples(values);
}

int node_of(const Grid1D& grid, double x) {
    const int i = static_cast<int>(std::lround(x / grid.spacing())) - 1;
    return std::clamp(i, 0, grid.size() - 1);
}

void check_start_node(const Potential& v, int node, const PathEnsemble& paths) {
    const Grid1D& grid = v.grid();
    if (node < 0 || node >= grid.size()) throw ValidationError("stochastic", "node out of range");
    if (std::fabs(grid.node(node) - paths.config().start) > 1e-12)
        throw ValidationError("stochastic", "ensemble start does not coincide with the requested node");
}

}  // namespace

MCEstimate estimate_from_samples(std::span<const double> samples) {
    MCEstimate e;
    e.n_effective = samples.size();
    if (samples.empty()) return e;
    const double n = static_cast<double>(samples.size());
    e.mean = pairwise_sum(samples) / n;
    if (samples.size() > 1) {
        std::vector<double> dev(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) dev[i] = (samples[i] - e.mean) * (samples[i] - e.mean);
        const double var = pairwise_sum(dev) / (n - 1.0);
        e.std_error = std::sqrt(var / n);
    }
    return e;
}

PathEnsemble::PathEnsemble(PathConfig config, int workers) : config_(config), workers_(std::max(1, workers)) {
    if (!(config_.start > 0.0 && config_.start < 1.0))
        throw ValidationError("stochastic", "path start must lie inside (0, 1)");
    if (!(config_.horizon > 0.0)) throw ValidationError("stochastic", "horizon t must be positive");
    if (config_.substeps < 8) throw ValidationError("stochastic", "need at least 8 substeps");
    if (config_.count < 1) throw ValidationError("stochastic", "need at least one path");

    const int m = config_.substeps;
    const std::size_t stride = static_cast<std::size_t>(m + 1);
    positions_.resize(config_.count * stride);
    absorbed_.assign(config_.count, m + 1);
    const double sigma = std::sqrt(2.0 * config_.horizon / m);

    parallel_for(config_.count, workers_, [&](std::size_t begin, std::size_t end) {
        std::array<double, 4> normals{};
        for (std::size_t p = begin; p < end; ++p) {
            const rng::CounterStream stream(config_.seed, rng::Stream::Paths, p);
            double* row = positions_.data() + p * stride;
            double x = config_.start;
            row[0] = x;
            bool alive = true;
            for (int k = 1; k <= m; ++k) {
                const int lane = (k - 1) % 4;
                if (lane == 0) {
                    const rng::Counter block = stream.block(static_cast<std::uint64_t>((k - 1) / 4));
                    const auto a = rng::box_muller(block[0], block[1]);
                    const auto b = rng::box_muller(block[2], block[3]);
                    normals = {a[0], a[1], b[0], b[1]};
                }
                if (alive) {
                    x += sigma * normals[static_cast<std::size_t>(lane)];
                    if (x <= 0.0 || x >= 1.0) {
                        alive = false;
                        absorbed_[p] = k;
                    }
                }
                row[k] = x;
            }
        }
    });
}

double PathEnsemble::survival_fraction() const {
    std::size_t alive = 0;
    for (std::size_t p = 0; p < size(); ++p) alive += survived(p) ? 1 : 0;
    return static_cast<double>(alive) / static_cast<double>(size());
}

double PathEnsemble::path_integral(std::size_t p, const Potential& v) const {
    const int last = std::min(config_.substeps, absorbed_[p]);
    double s = 0.0;
    for (int k = 0; k < last; ++k) s += potential_at(v, position(p, k));
    return s * step();
}

PathEnsemble sample_paths(double x, double t, int m, std::size_t n, std::uint64_t seed, int workers) {
    return PathEnsemble(PathConfig{x, t, m, n, seed}, workers);
}

double potential_at(const Potential& v, double x) { return v[node_of(v.grid(), x)]; }

double interpolate_grid(std::span<const double> values, double x) {
    const int n = static_cast<int>(values.size());
    if (x <= 0.0 || x >= 1.0) return 0.0;
    const double pos = x * (n + 1);  // node i sits at pos = i + 1
    const int left = static_cast<int>(std::floor(pos));
    const double frac = pos - left;
    const double a = left >= 1 ? values[static_cast<std::size_t>(left - 1)] : 0.0;
    const double b = left <= n - 1 ? values[static_cast<std::size_t>(left)] : 0.0;
    return (1.0 - frac) * a + frac * b;
}

ReproducingCheck fk_reproducing_check(std::span<const double> phi, double lambda, const Potential& v,
                                      const PathEnsemble& paths) {
    if (static_cast<int>(phi.size()) != v.grid().size())
        throw ValidationError("stochastic", "eigenfunction and potential live on different grids");
    const double t = paths.config().horizon;
    const double growth = std::exp(lambda * t);
    ReproducingCheck out;
    out.estimate = estimate_paths(paths, [&](std::size_t p) {
        if (!paths.survived(p)) return 0.0;
        const double weight = std::exp(-paths.path_integral(p, v));
        return growth * interpolate_grid(phi, paths.position(p, paths.substeps())) * weight;
    });
    out.target = interpolate_grid(phi, paths.config().start);
    out.allowance = t * v.max() * std::fabs(out.target) / paths.substeps();
    out.pass = std::fabs(out.estimate.mean - out.target) <= 3.0 * out.estimate.std_error + out.allowance;
    return out;
}

MCEstimate avg_potential_mc(const Potential& v, const PathEnsemble& paths) {
    const double t = paths.config().horizon;
    return estimate_paths(paths, [&](std::size_t p) { return paths.path_integral(p, v) / t; });
}

MCEstimate second_moment_mc(const Potential& v, const PathEnsemble& paths) {
    return estimate_paths(paths, [&](std::size_t p) {
        const double s = paths.path_integral(p, v);
        return s * s;
    });
}

double left_point_mean(const Potential& v, int node, double t, int m) {
    const double h = v.grid().spacing();
    const double dt = t / m;
    double s = v[node];
    for (int k = 1; k < m; ++k)
        s += convolve_at(v.values(), sample_gaussian(KernelSpec(1, k * dt), h), BoundaryPolicy::Reflect, node);
    return s / m;
}

double left_point_second_moment(const Potential& v, int node, double t, int m) {
    const Grid1D& grid = v.grid();
    const int n = grid.size();
    const double h = grid.spacing();
    const double dt = t / m;
    const auto field = v.values();

    std::vector<DiscreteKernel> gauss;
    gauss.reserve(static_cast<std::size_t>(m));
    gauss.emplace_back();  // k = 0 is the point mass at the start
    for (int k = 1; k < m; ++k) gauss.push_back(sample_gaussian(KernelSpec(1, k * dt), h));
    const int reach = gauss.back().radius;

    auto wrap = [n](int i) {
        const int period = 2 * n;
        int r = i % period;
        if (r < 0) r += period;
        return r < n ? r : period - 1 - r;
    };

    // tail[k][y] = sum_{L=1}^{m-1-k} V(y) (V * g_{L dt})(y), y in the window around node.
    const int width = 2 * reach + 1;
    std::vector<double> lagged(static_cast<std::size_t>(m) * static_cast<std::size_t>(width), 0.0);
    auto at = [&](int lag, int offset) -> double& {
        return lagged[static_cast<std::size_t>(lag) * static_cast<std::size_t>(width) +
                      static_cast<std::size_t>(offset + reach)];
    };
    for (int lag = 1; lag < m; ++lag) {
        for (int j = -reach; j <= reach; ++j) {
            const int y = wrap(node + j);
            const double vy = field[static_cast<std::size_t>(y)];
            at(lag, j) = vy == 0.0 ? 0.0 : vy * convolve_at(field, gauss[static_cast<std::size_t>(lag)],
                                                            BoundaryPolicy::Reflect, y);
        }
    }
    // Prefix sums over lag: cumulative[L] = sum_{l=1}^{L} lagged[l].
    for (int lag = 2; lag < m; ++lag)
        for (int j = -reach; j <= reach; ++j) at(lag, j) += at(lag - 1, j);

    double total = 0.0;
    for (int k = 0; k < m; ++k) {
        const int max_lag = m - 1 - k;
        auto integrand = [&](int j) {
            const double vy = field[static_cast<std::size_t>(wrap(node + j))];
            const double tail = max_lag >= 1 ? at(max_lag, j) : 0.0;
            return vy * vy + 2.0 * tail;
        };
        if (k == 0) {
            total += integrand(0);
            continue;
        }
        const DiscreteKernel& g = gauss[static_cast<std::size_t>(k)];
        double e = 0.0;
        for (int j = -g.radius; j <= g.radius; ++j) e += g.weight(j) * h * integrand(j);
        total += e;
    }
    return total * dt * dt;
}

ComparisonCheck avg_potential_check(const Potential& v, int node, const PathEnsemble& paths) {
    check_start_node(v, node, paths);
    const double t = paths.config().horizon;
    ComparisonCheck out;
    out.estimate = avg_potential_mc(v, paths);
    const DiscreteKernel k = sample_kernel(KernelSpec(1, t), v.grid().spacing());
    out.reference = convolve_at(v.values(), k, BoundaryPolicy::Reflect, node);
    out.allowance = std::fabs(left_point_mean(v, node, t, paths.substeps()) - out.reference);
    out.pass = std::fabs(out.estimate.mean - out.reference) <= 3.0 * out.estimate.std_error + out.allowance;
    return out;
}

ComparisonCheck second_moment_check(const Potential& v, int node, const PathEnsemble& paths) {
    check_start_node(v, node, paths);
    const double t = paths.config().horizon;
    ComparisonCheck out;
    out.estimate = second_moment_mc(v, paths);
    out.reference = second_order_term(v, node, t);
    out.allowance = std::fabs(left_point_second_moment(v, node, t, paths.substeps()) - out.reference);
    out.pass = std::fabs(out.estimate.mean - out.reference) <= 3.0 * out.estimate.std_error + out.allowance;
    return out;
}

KhasminskiiReport khasminskii_check(const Potential& v, double t, std::span<const int> nodes,
                                    const PathConfig& budget, int workers) {
    KhasminskiiReport rep;
    const auto vt = regularized_potential(v, t, BoundaryPolicy::Reflect);
    rep.alpha = t * *std::max_element(vt.values.begin(), vt.values.end());
    if (!(rep.alpha < 1.0)) {
        rep.notice = "lemma precondition unmet (alpha = " + std::to_string(rep.alpha) + " >= 1)";
        return rep;
    }
    rep.precondition_met = true;
    rep.bound = 1.0 / (1.0 - rep.alpha);
    rep.mc_sup = -1.0;
    for (int node : nodes) {
        if (node < 0 || node >= v.grid().size()) throw ValidationError("stochastic", "node out of range");
        PathConfig cfg = budget;
        cfg.start = v.grid().node(node);
        cfg.horizon = t;
        cfg.seed = budget.seed + static_cast<std::uint64_t>(node) + 1;
        const PathEnsemble paths(cfg, workers);
        const MCEstimate e =
            estimate_paths(paths, [&](std::size_t p) { return std::exp(paths.path_integral(p, v)); });
        if (e.mean > rep.mc_sup) {
            rep.mc_sup = e.mean;
            rep.mc_sup_std_error = e.std_error;
            rep.argmax_node = node;
        }
    }
    rep.pass = rep.mc_sup <= rep.bound + 3.0 * rep.mc_sup_std_error;
    return rep;
}

KhasminskiiScalar khasminskii_constant(double c, double t) {
    KhasminskiiScalar s;
    s.alpha = c * t;
    s.exact = std::exp(s.alpha);
    s.bound = s.alpha < 1.0 ? 1.0 / (1.0 - s.alpha) : std::numeric_limits<double>::infinity();
    return s;
}

double scale_for_alpha(const Potential& v, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("stochastic", "alpha must lie in (0, 1)");
    if (!(v.max() > 0.0)) throw ValidationError("stochastic", "alpha is zero for V == 0");
    auto alpha_of = [&](double t) {
        const auto vt = regularized_potential(v, t, BoundaryPolicy::Reflect);
        return t * *std::max_element(vt.values.begin(), vt.values.end());
    };
    const double t_max = 1e-2;
    if (alpha_of(t_max) < alpha) throw ValidationError("stochastic", "alpha not reached for t <= 1e-2");
    double lo = std::log(1e-12), hi = std::log(t_max);
    for (int i = 0; i < 40; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (alpha_of(std::exp(mid)) < alpha)
            lo = mid;
        else
            hi = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

}  // namespace regpot
