#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "regpot/eigen.hpp"
#include "regpot/hamiltonian.hpp"

// Feynman-Kac Monte Carlo on (0, 1): Brownian paths with generator Delta
// (increment variance 2 ds), absorbed when a substep endpoint leaves the
// interval.  Path integrals of V use the left-point rule.

namespace regpot {

struct MCEstimate {
    double mean = 0.0;
    double std_error = 0.0;     // sample std / sqrt(n_effective)
    std::size_t n_effective = 0;
};

/// Mean and standard error with pairwise summation (reduction order fixed
/// by sample index, never by worker count).
MCEstimate estimate_from_samples(std::span<const double> samples);

struct PathConfig {
    double start = 0.5;
    double horizon = 1e-4;
    int substeps = 64;
    std::size_t count = 100000;
    std::uint64_t seed = 0;
};

class PathEnsemble {
public:
    PathEnsemble(PathConfig config, int workers = 1);

    const PathConfig& config() const noexcept { return config_; }
    std::size_t size() const noexcept { return config_.count; }
    int substeps() const noexcept { return config_.substeps; }
    double step() const noexcept { return config_.horizon / config_.substeps; }

    /// Position of path p after k substeps, k = 0..m.  Frozen after absorption.
    double position(std::size_t p, int k) const {
        return positions_[p * static_cast<std::size_t>(config_.substeps + 1) + static_cast<std::size_t>(k)];
    }
    /// Substep at which path p first left (0, 1), or m + 1 if it survived.
    int absorption_step(std::size_t p) const { return absorbed_[p]; }
    bool survived(std::size_t p) const { return absorbed_[p] > config_.substeps; }
    double survival_fraction() const;

    /// Left-point sum_{k < min(m, tau)} V(w_k) dt for one path; V read by nearest node cell.
    double path_integral(std::size_t p, const Potential& v) const;

    int workers() const noexcept { return workers_; }

private:
    PathConfig config_;
    int workers_;
    std::vector<double> positions_;
    std::vector<int> absorbed_;
};

/// Convenience wrapper matching the (x, t, m, N, seed) signature.
PathEnsemble sample_paths(double x, double t, int m, std::size_t n, std::uint64_t seed, int workers = 1);

/// V at a continuous position: value of the node cell containing x.
double potential_at(const Potential& v, double x);

/// Linear interpolation of a grid function, zero at x = 0 and x = 1.
double interpolate_grid(std::span<const double> values, double x);

struct ReproducingCheck {
    MCEstimate estimate;   // e^{lambda t} E[phi(w_t) exp(-int V)]
    double target = 0.0;   // phi(x)
    double allowance = 0.0;  // t ||V||_inf |phi(x)| / m
    bool pass = false;
};

/// phi(x) = e^{lambda t} E[ phi(w(t)) exp(-int_0^t V(w(s)) ds) ], absorbed paths
/// contributing zero.  Pass iff |estimate - phi(x)| <= 3 std_error + allowance.
ReproducingCheck fk_reproducing_check(std::span<const double> phi, double lambda, const Potential& v,
                                      const PathEnsemble& paths);

/// MC estimate of (1/t) int_0^t V(w(s)) ds.
MCEstimate avg_potential_mc(const Potential& v, const PathEnsemble& paths);

/// MC estimate of (int_0^t V(w(s)) ds)^2.
MCEstimate second_moment_mc(const Potential& v, const PathEnsemble& paths);

/// Exact free-space expectation of the left-point estimator used by
/// avg_potential_mc: (1/m) sum_{k<m} (V * g_{k dt})(x).  Its difference to
/// (V * k_t)(x) is the time-discretization bias.
double left_point_mean(const Potential& v, int node, double t, int m);

/// Exact free-space expectation of the left-point estimator used by
/// second_moment_mc.
double left_point_second_moment(const Potential& v, int node, double t, int m);

struct ComparisonCheck {
    MCEstimate estimate;
    double reference = 0.0;   // deterministic value
    double allowance = 0.0;   // |time-discretization bias|
    bool pass = false;        // |mean - reference| <= 3 std_error + allowance
};

/// avg_potential_mc against (V * k_t)(x) at the ensemble's start node.
ComparisonCheck avg_potential_check(const Potential& v, int node, const PathEnsemble& paths);

/// second_moment_mc against the deterministic double integral.
ComparisonCheck second_moment_check(const Potential& v, int node, const PathEnsemble& paths);

struct KhasminskiiReport {
    double alpha = 0.0;        // t max_x (V * k_t)(x)
    double bound = 0.0;        // 1 / (1 - alpha)
    double mc_sup = 0.0;       // max over sampled x of E exp(+int V)
    double mc_sup_std_error = 0.0;
    int argmax_node = -1;
    bool precondition_met = false;
    bool pass = false;
    std::string notice;
};

/// Empirical check of Khasminskii's lemma over the given start nodes.
KhasminskiiReport khasminskii_check(const Potential& v, double t, std::span<const int> nodes,
                                    const PathConfig& budget, int workers = 1);

/// Both sides for a potential constant on all of space: e^{ct} and 1/(1-ct).
struct KhasminskiiScalar {
    double alpha = 0.0;
    double exact = 0.0;
    double bound = 0.0;
};
KhasminskiiScalar khasminskii_constant(double c, double t);

/// Smallest t (found by bisection in log t) with t max(V * k_t) = alpha.
double scale_for_alpha(const Potential& v, double alpha);

}  // namespace regpot
