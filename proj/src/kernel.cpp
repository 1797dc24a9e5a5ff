#include "regpot/kernel.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "regpot/error.hpp"
#include "regpot/quadrature.hpp"
#include "regpot/special.hpp"

namespace regpot {

namespace {

void check_spec(const KernelSpec& spec) {
    if (spec.dimension < 1) throw ValidationError("kernel", "dimension must be >= 1");
    if (!(spec.scale > 0.0) || !std::isfinite(spec.scale))
        throw ValidationError("kernel", "scale t must be positive and finite");
}

// Defining integral after s = t w^2:  2 int_0^1 w (4 pi t w^2)^{-d/2} e^{-z/w^2} dw,
// z = r^2/(4t).  Evaluated in log space so large d / small w cannot overflow.
double quadrature_impl(const KernelSpec& spec, double r, double abs_tol, double rel_tol) {
    const double t = spec.scale;
    const double z = r * r / (4.0 * t);
    const double half_d = 0.5 * spec.dimension;
    const double log4pit = std::log(4.0 * std::numbers::pi * t);
    auto integrand = [=](double w) {
        if (w <= 0.0) return 0.0;
        const double log_val =
            std::log(2.0 * w) - half_d * (log4pit + 2.0 * std::log(w)) - z / (w * w);
        return std::exp(log_val);
    };
    // The integrand is concentrated above w ~ sqrt(z); splitting there lets
    // the adaptive rule see the boundary layer in its first pass.
    const double knee = std::sqrt(z);
    double total = 0.0;
    if (knee > 0.0 && knee < 1.0) {
        const auto lo = quad::integrate(integrand, 0.0, knee, 0.5 * abs_tol, rel_tol);
        const auto hi = quad::integrate(integrand, knee, 1.0, 0.5 * abs_tol, rel_tol);
        total = lo.value + hi.value;
    } else {
        total = quad::integrate(integrand, 0.0, 1.0, abs_tol, rel_tol).value;
    }
    return total;
}

}  // namespace

KernelSpec::KernelSpec(int d, double t) : dimension(d), scale(t) { check_spec(*this); }

double eval_kernel(const KernelSpec& spec, double r) {
    check_spec(spec);
    if (!(r >= 0.0)) throw ValidationError("kernel", "radius must be nonnegative");
    if (r == 0.0 && spec.dimension >= 2)
        throw DomainError("kernel", "kernel singular at origin");
    const double t = spec.scale;
    const double z = r * r / (4.0 * t);
    switch (spec.dimension) {
        case 1: {
            const double sz = std::sqrt(z);
            const double bracket = std::exp(-z) / std::sqrt(std::numbers::pi) - sz * special::erfc(sz);
            return std::max(0.0, bracket) / std::sqrt(t);
        }
        case 2:
            return special::expint_e1(z) / (4.0 * std::numbers::pi * t);
        default:
            return quadrature_impl(spec, r, std::numeric_limits<double>::min(), 1e-12);
    }
}

double eval_kernel_quadrature(const KernelSpec& spec, double r, double tolerance) {
    check_spec(spec);
    if (!(r > 0.0)) throw ValidationError("kernel", "quadrature requires r > 0");
    if (!(tolerance > 0.0)) throw ValidationError("kernel", "tolerance must be positive");
    return quadrature_impl(spec, r, tolerance, 0.0);
}

double eval_gaussian(const KernelSpec& spec, double r) {
    check_spec(spec);
    const double t = spec.scale;
    return std::exp(-r * r / (4.0 * t)) /
           std::pow(4.0 * std::numbers::pi * t, 0.5 * spec.dimension);
}

double kernel_mass_1d(double t, double r) {
    if (!(t > 0.0)) throw ValidationError("kernel", "scale t must be positive");
    if (r <= 0.0) return 0.0;
    const double y = r / (2.0 * std::sqrt(t));
    // 2 * [erf(y)/2 - y^2 erfc(y) + y e^{-y^2}/sqrt(pi)]
    const double m = special::erf(y) - 2.0 * y * y * special::erfc(y) +
                     2.0 * y * std::exp(-y * y) / std::sqrt(std::numbers::pi);
    return std::min(1.0, m);
}

double gaussian_mass_1d(double t, double r) {
    if (!(t > 0.0)) throw ValidationError("kernel", "scale t must be positive");
    if (r <= 0.0) return 0.0;
    return special::erf(r / (2.0 * std::sqrt(t)));
}

}  // namespace regpot
