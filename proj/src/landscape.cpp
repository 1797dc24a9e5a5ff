#include "regpot/landscape.hpp"

#include <cmath>

#include "regpot/error.hpp"

namespace regpot {

LandscapeSolution solve_landscape(const TridiagonalOperator& h, std::span<const double> f) {
    const int n = h.size();
    if (static_cast<int>(f.size()) != n) throw ValidationError("landscape", "right-hand side length mismatch");
    for (double x : f)
        if (!(x > 0.0)) throw ValidationError("landscape", "right-hand side must be strictly positive");

    // Thomas algorithm; H is diagonally dominant for V >= 0 so no pivoting.
    std::vector<double> c(static_cast<std::size_t>(n));
    std::vector<double> u(f.begin(), f.end());
    double denom = h.diag[0];
    c[0] = n > 1 ? h.offdiag[0] / denom : 0.0;
    u[0] /= denom;
    for (int i = 1; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double e = h.offdiag[k - 1];
        denom = h.diag[k] - e * c[k - 1];
        c[k] = i + 1 < n ? h.offdiag[k] / denom : 0.0;
        u[k] = (u[k] - e * u[k - 1]) / denom;
    }
    for (int i = n - 2; i >= 0; --i) {
        const auto k = static_cast<std::size_t>(i);
        u[k] -= c[k] * u[k + 1];
    }

    for (double x : u)
        if (!(x > 0.0))
            throw NumericalError("landscape", "solution not positive; operator violates V >= 0 or f > 0");

    LandscapeSolution sol;
    sol.rhs.assign(f.begin(), f.end());
    const auto hu = apply_operator(h, u);
    double res = 0.0;
    for (std::size_t i = 0; i < hu.size(); ++i) res = std::max(res, std::fabs(hu[i] - sol.rhs[i]));
    sol.residual = res;
    sol.values = std::move(u);
    return sol;
}

LandscapeSolution landscape_function(const Potential& v) {
    const std::vector<double> ones(static_cast<std::size_t>(v.grid().size()), 1.0);
    return generalized_landscape(v, ones);
}

LandscapeSolution generalized_landscape(const Potential& v, std::span<const double> f) {
    LandscapeSolution sol = solve_landscape(assemble_hamiltonian(v.grid(), v), f);
    sol.potential = std::make_shared<const Potential>(v);
    return sol;
}

std::vector<double> inverse_landscape(const LandscapeSolution& u) {
    std::vector<double> out(u.values.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!(u.values[i] > 0.0)) throw NumericalError("landscape", "landscape function not positive");
        out[i] = 1.0 / u.values[i];
    }
    return out;
}

std::vector<double> generalized_effective_potential(const LandscapeSolution& v, double t, BoundaryPolicy policy) {
    const Grid1D grid(static_cast<int>(v.values.size()));
    const DiscreteKernel k = sample_kernel(KernelSpec(1, t), grid.spacing());
    const std::vector<double> smoothed = convolve(v.rhs, k, policy);
    std::vector<double> out(smoothed.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!(v.values[i] > 0.0)) throw NumericalError("landscape", "generalized landscape not positive");
        out[i] = smoothed[i] / v.values[i];
    }
    return out;
}

}  // namespace regpot
