#include "regpot/regularize.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "regpot/error.hpp"
#include "regpot/quadrature.hpp"

namespace regpot {

namespace {

// Map an out-of-range index into [0, n) by half-sample even reflection.
inline int reflect_index(int i, int n) {
    const int period = 2 * n;
    int m = i % period;
    if (m < 0) m += period;
    return m < n ? m : period - 1 - m;
}

inline double field_value(std::span<const double> field, int i, BoundaryPolicy policy) {
    const int n = static_cast<int>(field.size());
    if (i >= 0 && i < n) return field[static_cast<std::size_t>(i)];
    if (policy == BoundaryPolicy::ZeroPad) return 0.0;
    return field[static_cast<std::size_t>(reflect_index(i, n))];
}

template <class Mass>
DiscreteKernel build_kernel(const KernelSpec& spec, double h, KernelShape shape, Mass mass) {
    if (spec.dimension != 1) throw ValidationError("regularize", "grid kernels are one-dimensional");
    if (!(h > 0.0)) throw ValidationError("regularize", "grid spacing must be positive");
    const double t = spec.scale;
    DiscreteKernel k;
    k.spec = spec;
    k.shape = shape;
    k.spacing = h;

    const double center_mass = mass(t, 0.5 * h);
    if (center_mass >= 1.0 - 1e-15) {
        k.identity = true;
        k.radius = 0;
        k.weights = {1.0 / h};
        k.truncation_radius = 0.5 * h;
        k.renormalization_drift = 1.0 - center_mass;
        return k;
    }

    const double reach = std::max(10.0 * std::sqrt(t), 5.0 * h);
    const int radius = static_cast<int>(std::ceil(reach / h - 1e-9));
    k.radius = radius;
    k.truncation_radius = radius * h;
    k.weights.assign(static_cast<std::size_t>(2 * radius + 1), 0.0);

    // mass(t, r) is the mass on [-r, r]; one side of a cell ring is half of it.
    double previous = center_mass;
    k.weights[static_cast<std::size_t>(radius)] = center_mass / h;
    double total = center_mass;
    for (int j = 1; j <= radius; ++j) {
        const double outer = mass(t, (j + 0.5) * h);
        const double w = 0.5 * (outer - previous) / h;
        previous = outer;
        k.weights[static_cast<std::size_t>(radius + j)] = w;
        k.weights[static_cast<std::size_t>(radius - j)] = w;
        total += 2.0 * w * h;
    }
    k.renormalization_drift = std::fabs(1.0 - total);
    for (double& w : k.weights) w /= total;
    return k;
}

}  // namespace

std::string to_string(BoundaryPolicy p) { return p == BoundaryPolicy::Reflect ? "reflect" : "zero-pad"; }

BoundaryPolicy parse_boundary_policy(const std::string& s) {
    if (s == "reflect") return BoundaryPolicy::Reflect;
    if (s == "zero-pad" || s == "zero") return BoundaryPolicy::ZeroPad;
    throw ValidationError("regularize", "unknown boundary policy '" + s + "' (expected reflect or zero-pad)");
}

DiscreteKernel sample_kernel(const KernelSpec& spec, double h) {
    return build_kernel(spec, h, KernelShape::Regularizing, kernel_mass_1d);
}

DiscreteKernel sample_gaussian(const KernelSpec& spec, double h) {
    return build_kernel(spec, h, KernelShape::Heat, gaussian_mass_1d);
}

double convolve_at(std::span<const double> field, const DiscreteKernel& k, BoundaryPolicy policy, int i) {
    // Written as f_i + sum_j w_j h (f_{i-j} - f_i), which equals the plain sum
    // because the weights have unit mass, and reproduces constants exactly.
    const double h = k.spacing;
    const double center = field[static_cast<std::size_t>(i)];
    double acc = 0.0;
    for (int j = 1; j <= k.radius; ++j) {
        const double w = k.weights[static_cast<std::size_t>(k.radius + j)] * h;
        acc += w * ((field_value(field, i - j, policy) - center) + (field_value(field, i + j, policy) - center));
    }
    return center + acc;
}

std::vector<double> convolve(std::span<const double> field, const DiscreteKernel& k, BoundaryPolicy policy) {
    const int n = static_cast<int>(field.size());
    std::vector<double> out(field.size());
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = convolve_at(field, k, policy, i);
    return out;
}

RegularizedPotential regularized_potential(const Potential& v, double t, BoundaryPolicy policy) {
    RegularizedPotential out;
    out.scale = t;
    out.policy = policy;
    if (t == 0.0) {
        out.identity = true;
        out.values = v.vector();
        return out;
    }
    const DiscreteKernel k = sample_kernel(KernelSpec(1, t), v.grid().spacing());
    out.identity = k.identity;
    out.values = convolve(v.values(), k, policy);
    return out;
}

double default_scale(const Potential& v) {
    const double h = v.grid().spacing();
    const double lo = 4.0 * h * h;
    const double hi = 1e-2;
    const double mean = v.mean();
    if (!(mean > 0.0)) return hi;
    return std::clamp(1.0 / mean, lo, hi);
}

double second_order_term(const Potential& v, int node, double t) {
    const Grid1D& grid = v.grid();
    if (node < 0 || node >= grid.size()) throw ValidationError("regularize", "node out of range");
    if (!(t > 0.0)) throw ValidationError("regularize", "t must be positive");
    if (grid.boundary_distance(node) < 5.0 * std::sqrt(t))
        throw ValidationError("regularize", "second-order term needs dist(x, boundary) >= 5 sqrt(t)");

    const double h = grid.spacing();
    const auto field = v.values();
    const int n = grid.size();

    // s = t w^2 removes the sqrt(s) behaviour at s = 0; graded panels in w
    // resolve the (t - s) V_{t-s} endpoint at w = 1.
    static constexpr std::array<double, 7> kPanels = {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0};
    const quad::GaussLegendreRule rule = quad::gauss_legendre(12);

    double integral = 0.0;
    for (std::size_t p = 0; p + 1 < kPanels.size(); ++p) {
        const double a = kPanels[p];
        const double b = kPanels[p + 1];
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double w = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[q];
            const double s = t * w * w;
            const double jacobian = 2.0 * t * w * 0.5 * (b - a) * rule.weights[q];
            const DiscreteKernel gauss = sample_gaussian(KernelSpec(1, s), h);
            const DiscreteKernel later = sample_kernel(KernelSpec(1, t - s), h);
            double inner = 0.0;
            for (int j = -gauss.radius; j <= gauss.radius; ++j) {
                const int y = reflect_index(node + j, n);
                const double vy = field[static_cast<std::size_t>(y)];
                if (vy == 0.0) continue;
                inner += gauss.weight(j) * h * vy * convolve_at(field, later, BoundaryPolicy::Reflect, y);
            }
            integral += jacobian * 2.0 * (t - s) * inner;
        }
    }
    return integral;
}

}  // namespace regpot
