#pragma once

#include <span>
#include <vector>

#include "regpot/hamiltonian.hpp"

namespace regpot {

struct EigenPair {
    int index = 0;       // 1-based rank in ascending order
    double lambda = 0.0;
    std::vector<double> phi;  // max-norm 1, positive at its largest-magnitude node
};

/// Number of eigenvalues of H strictly below x (Sturm sequence / LDL^T
/// inertia, with the LAPACK pivmin guard against zero pivots).
int sturm_count(const TridiagonalOperator& h, double x);

struct SpectrumBounds {
    double lower = 0.0;
    double upper = 0.0;
};
SpectrumBounds gershgorin_bounds(const TridiagonalOperator& h);

/// The k smallest eigenpairs: bisection on Sturm counts to relative width
/// 1e-12, then inverse iteration (at least three sweeps, Gram-Schmidt against
/// earlier vectors whose eigenvalues lie within 1e-6 of the spectral spread).
std::vector<EigenPair> lowest_eigenpairs(const TridiagonalOperator& h, int k);

/// <Hw, w> / <w, w>.
double rayleigh_quotient(const TridiagonalOperator& h, std::span<const double> w);

/// ||H phi - lambda phi||_inf.
double eigen_residual(const TridiagonalOperator& h, const EigenPair& pair);

}  // namespace regpot
