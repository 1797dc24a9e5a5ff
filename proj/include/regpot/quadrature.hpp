#pragma once

#include <functional>
#include <vector>

namespace regpot::quad {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;  // estimated absolute error
    int evaluations = 0;
    int subintervals = 0;
};

/// Globally adaptive 15-point Gauss-Kronrod integration of f on [a, b].
/// Stops once the summed error estimate is below max(abs_tol, rel_tol*|I|).
/// Throws NumericalError carrying the achieved estimate when the
/// subdivision budget is exhausted.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol, double rel_tol = 0.0, int max_subintervals = 4000);

struct GaussLegendreRule {
    std::vector<double> nodes;    // on [-1, 1], ascending
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule computed by Newton iteration on P_n.
GaussLegendreRule gauss_legendre(int n);

}  // namespace regpot::quad
