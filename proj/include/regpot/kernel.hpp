#pragma once

// Continuum form of the regularization kernel
//
//   k_t(x) = (1/t) int_0^t exp(-|x|^2/(4s)) / (4 pi s)^{d/2} ds,
//
// i.e. the heat kernel averaged over times [0, t], together with the plain
// heat kernel g_t used as a comparison kernel.  All functions take the
// radial distance r = |x|.

namespace regpot {

struct KernelSpec {
    int dimension = 1;
    double scale = 0.0;  // t, units of length^2

    KernelSpec() = default;
    KernelSpec(int d, double t);  // validates d >= 1, t > 0
};

/// k_t(r).  Closed form for d=1 (erfc) and d=2 (E1 = Gamma(0, .)); adaptive
/// quadrature of the defining integral for d >= 3.  r = 0 is singular for
/// d >= 2 and raises DomainError.
double eval_kernel(const KernelSpec& spec, double r);

/// Adaptive quadrature of the defining time integral, absolute error <= tolerance.
double eval_kernel_quadrature(const KernelSpec& spec, double r, double tolerance);

/// Heat kernel at time t: (4 pi t)^{-d/2} exp(-r^2/(4t)).
double eval_gaussian(const KernelSpec& spec, double r);

/// Mass of the d=1 kernel on [-r, r], closed form of int_{-r}^{r} k_t.
/// Used to build cell-averaged grid kernels.
double kernel_mass_1d(double t, double r);

/// Mass of the d=1 heat kernel g_t on [-r, r] = erf(r / (2 sqrt t)).
double gaussian_mass_1d(double t, double r);

}  // namespace regpot
