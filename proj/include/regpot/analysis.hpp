#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "regpot/eigen.hpp"
#include "regpot/hamiltonian.hpp"
#include "regpot/landscape.hpp"
#include "regpot/regularize.hpp"

namespace regpot {

// ---------------------------------------------------------------------------
// Residuals of the regularized equations
//
//   eigenfunction:  R = -Delta_h phi + (V * k_t) phi - lambda phi
//   landscape:      R = -Delta_h u   + (V * k_t) u   - f
//
// Since H phi = lambda phi (resp. H u = f) holds in the discrete system, both
// equal (V * k_t - V) times the solution up to rounding; identity_error
// measures that relative to the size of the individual terms.
// ---------------------------------------------------------------------------

struct ResidualEntry {
    double scale = 0.0;           // t
    double sup_norm = 0.0;        // max |R| over the window
    double weighted_norm = 0.0;   // sum |R||w| / sum w^2 over the window (w = phi or u)
    double identity_error = 0.0;  // max |R - (V_t - V) w| / term scale
};

struct ResidualReport {
    std::vector<ResidualEntry> entries;  // ordered by strictly decreasing t
    std::vector<std::uint8_t> window;    // 1 where dist(x, boundary) >= 5 sqrt(t_max)
    double slope = 0.0;                  // least-squares slope of log sup_norm vs log t
    double weighted_slope = 0.0;
};

/// Interior mask dist(x_i, boundary) >= 5 sqrt(t); ValidationError if empty.
std::vector<std::uint8_t> interior_window(const Grid1D& grid, double t);

ResidualEntry thm1_residual(const EigenPair& pair, const Potential& v, double t, std::span<const std::uint8_t> window,
                            BoundaryPolicy policy = BoundaryPolicy::Reflect);

ResidualEntry thm2_residual(const LandscapeSolution& u, const Potential& v, double t, std::span<const std::uint8_t> window,
                            BoundaryPolicy policy = BoundaryPolicy::Reflect);

/// Both over a sweep of t; the window is fixed by the largest t.
ResidualReport eigen_residual_sweep(const EigenPair& pair, const Potential& v, std::vector<double> ts,
                                    BoundaryPolicy policy = BoundaryPolicy::Reflect);
ResidualReport landscape_residual_sweep(const LandscapeSolution& u, const Potential& v, std::vector<double> ts,
                                        BoundaryPolicy policy = BoundaryPolicy::Reflect);

/// Ordinary least squares slope of log y against log x; needs >= 5 points.
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// n log-spaced values from hi down to lo (inclusive).
std::vector<double> log_sweep(double hi, double lo, int n);

/// (V * k_t)(x) - (V * g_t)(x) at a node.
double kernel_comparison(const Potential& v, int node, double t, BoundaryPolicy policy = BoundaryPolicy::Reflect);

// ---------------------------------------------------------------------------
// Agmon distance  rho(a, b) = int_a^b sqrt((w - lambda)_+) dx  (1-D: the segment
// is the minimizing path), trapezoidal on the grid.  `w` is the envelope
// potential (1/u or V_t), not a Brownian path.
// ---------------------------------------------------------------------------

double agmon_distance(std::span<const double> envelope_potential, double lambda, double h, int r0, int r);

/// rho(r0, i) for every node i.
std::vector<double> agmon_profile(std::span<const double> envelope_potential, double lambda, double h, int r0);

struct EnvelopeReport {
    int peak = 0;                   // r0 = argmax |phi|
    double offset = 0.0;            // smallest C with log|phi| <= -rho + C
    double violation_fraction = 0.0;
    int nodes_used = 0;
};

/// Fits log|phi(r)| <= -rho(r0, r) + C over nodes with |phi| > 1e-12 ||phi||_inf.
EnvelopeReport decay_envelope_check(std::span<const double> phi, std::span<const double> envelope_potential,
                                    double lambda, double h);

struct EnvelopeComparison {
    EnvelopeReport inverse_landscape;  // w = 1/u
    EnvelopeReport regularized;        // w = V_t
    double relative_difference = 0.0;  // |C_u - C_t| / max(|C_u|, |C_t|)
};
EnvelopeComparison compare_envelopes(const EigenPair& pair, std::span<const double> inverse_u,
                                     std::span<const double> vt, double h);

// ---------------------------------------------------------------------------
// Peaks
// ---------------------------------------------------------------------------

enum class PeakMode { Maxima, Minima };

struct PeakSet {
    std::vector<int> indices;         // sorted ascending
    std::vector<double> prominences;  // same order
    double prominence = 0.0;          // threshold applied
};

/// Local extrema (flat tops reported at their midpoint; the two end samples
/// are never extrema) whose prominence is at least `prominence`.  Prominence
/// is the height above the higher of the two lowest points reached before a
/// higher sample on each side.
PeakSet detect_peaks(std::span<const double> field, PeakMode mode, double prominence);

/// Threshold as a fraction of the field's range (default 10%).
double relative_prominence(std::span<const double> field, double fraction = 0.1);

/// The k most prominent peaks, sorted by index.
std::vector<int> top_peaks(const PeakSet& peaks, int k);

/// Distance in nodes to the closest entry of `targets`; INT_MAX when empty.
int nearest_distance(int index, std::span<const int> targets);

struct MatchRow {
    int eigen_index = 0;
    int peak_node = 0;  // argmax |phi|
    int dist_landscape = 0;
    int dist_regularized = 0;
    int dist_raw = 0;
    bool match_landscape = false;
    bool match_regularized = false;
    bool match_raw = false;
};

struct MatchReport {
    std::vector<MatchRow> rows;
    PeakSet landscape_peaks;     // maxima of u
    PeakSet regularized_valleys; // minima of V_t
    PeakSet raw_minima;          // minima of V
    int landscape_matches = 0;
    int regularized_matches = 0;
    int raw_matches = 0;
    int tolerance = 0;
};

MatchReport localization_match(std::span<const EigenPair> pairs, std::span<const double> u,
                               std::span<const double> vt, std::span<const double> v, int tolerance_nodes,
                               double prominence_fraction = 0.1);

int argmax_abs(std::span<const double> v);

}  // namespace regpot
