#pragma once

#include <memory>
#include <span>
#include <vector>

#include "regpot/hamiltonian.hpp"
#include "regpot/regularize.hpp"

namespace regpot {

/// Solution of (-Delta_h + V) u = f.  With f == 1 this is the landscape
/// function; with a general positive f it is the generalized landscape v.
struct LandscapeSolution {
    std::vector<double> values;
    std::vector<double> rhs;
    std::shared_ptr<const Potential> potential;  // may be null when solved from a bare operator
    double residual = 0.0;                       // ||H u - f||_inf at solve time
};

/// Direct two-pass tridiagonal elimination.  Requires f > 0; the solution
/// is checked for positivity (discrete maximum principle) afterwards.
LandscapeSolution solve_landscape(const TridiagonalOperator& h, std::span<const double> f);

/// Convenience: assemble H from V, solve with f == 1, and keep V attached.
LandscapeSolution landscape_function(const Potential& v);

/// Same with a general right-hand side.
LandscapeSolution generalized_landscape(const Potential& v, std::span<const double> f);

/// Pointwise 1/u.
std::vector<double> inverse_landscape(const LandscapeSolution& u);

/// (f * k_t) / v pointwise, the convolution using the given boundary policy.
std::vector<double> generalized_effective_potential(const LandscapeSolution& v, double t,
                                                    BoundaryPolicy policy = BoundaryPolicy::Reflect);

/// Scale used when t is not given explicitly for the generalized landscape.
inline constexpr double kDefaultGeneralizedScale = 0.001;

}  // namespace regpot
