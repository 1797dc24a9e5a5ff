#pragma once

#include <span>
#include <string>
#include <vector>

#include "regpot/hamiltonian.hpp"
#include "regpot/kernel.hpp"

namespace regpot {

enum class BoundaryPolicy {
    Reflect,  // half-sample even reflection: ... v1 v0 | v0 v1 ... (default)
    ZeroPad,  // field is zero outside (0, 1)
};

std::string to_string(BoundaryPolicy p);
BoundaryPolicy parse_boundary_policy(const std::string& s);

enum class KernelShape {
    Regularizing,  // k_t
    Heat,          // g_t, comparison Gaussian
};

/// Grid form of a 1-D kernel.  Weight j is the kernel's mass on the cell
/// [(j - 1/2) h, (j + 1/2) h] divided by h, so piecewise-constant fields
/// (one value per node cell) are convolved exactly.  Weights are then
/// rescaled so that sum_j w_j h = 1.
struct DiscreteKernel {
    KernelSpec spec;
    KernelShape shape = KernelShape::Regularizing;
    double spacing = 0.0;
    int radius = 0;                // R; offsets -R..R
    std::vector<double> weights;   // size 2R+1, weights[j + R]
    double truncation_radius = 0.0;
    double renormalization_drift = 0.0;  // |1 - sum w_j h| before rescaling
    bool identity = false;               // kernel narrower than one cell

    double weight(int offset) const { return weights[static_cast<std::size_t>(offset + radius)]; }
};

/// Grid kernel for k_t, truncated at R h = max(10 sqrt t, 5h).
DiscreteKernel sample_kernel(const KernelSpec& spec, double h);

/// Same construction for the heat kernel g_t.
DiscreteKernel sample_gaussian(const KernelSpec& spec, double h);

/// (field * K)_i = sum_j w_j h field_{i-j}, out-of-range indices filled per policy.
std::vector<double> convolve(std::span<const double> field, const DiscreteKernel& k,
                             BoundaryPolicy policy = BoundaryPolicy::Reflect);

/// Single output entry of convolve().
double convolve_at(std::span<const double> field, const DiscreteKernel& k, BoundaryPolicy policy, int i);

struct RegularizedPotential {
    std::vector<double> values;
    double scale = 0.0;
    BoundaryPolicy policy = BoundaryPolicy::Reflect;
    bool identity = false;
};

/// V_t = V * k_t on the potential's grid.  t == 0 returns V itself.
RegularizedPotential regularized_potential(const Potential& v, double t,
                                           BoundaryPolicy policy = BoundaryPolicy::Reflect);

/// 1/mean(V) clamped to [4 h^2, 1e-2].
double default_scale(const Potential& v);

/// E (int_0^t V(w(s)) ds)^2 for Brownian motion started at node x, from the
/// double integral
///   2 int_0^t int V(y) g_s(x - y) (t - s) (V * k_{t-s})(y) dy ds.
/// Requires dist(x, boundary) >= 5 sqrt t.
double second_order_term(const Potential& v, int node, double t);

}  // namespace regpot
