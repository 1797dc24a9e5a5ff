#include "regpot/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "regpot/error.hpp"

namespace regpot::special {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// erf(x) = 2/sqrt(pi) e^{-x^2} sum_n 2^n x^{2n+1} / (2n+1)!!, all terms positive.
double erf_series(double x) {
    const double two_x2 = 2.0 * x * x;
    double term = x;
    double sum = x;
    for (int n = 1; n < 500; ++n) {
        term *= two_x2 / (2.0 * n + 1.0);
        sum += term;
        if (term < kEps * sum) break;
    }
    return 2.0 / std::sqrt(std::numbers::pi) * std::exp(-x * x) * sum;
}

// Even continued fraction, modified Lentz:
// erfc x = 2x/sqrt(pi) e^{-x^2} / (2x^2+1 - 1*2/(2x^2+5 - 3*4/(2x^2+9 - ...)))
double erfc_scaled_cf(double x) {
    const double x2 = 2.0 * x * x;
    double f = x2 + 1.0;
    double c = f;
    double d = 0.0;
    for (int k = 1; k < 1000; ++k) {
        const double a = -(2.0 * k - 1.0) * (2.0 * k);
        const double b = x2 + 1.0 + 4.0 * k;
        d = b + a * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + a / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::fabs(delta - 1.0) < kEps) break;
    }
    return 2.0 * x / std::sqrt(std::numbers::pi) / f;
}

constexpr double kSeriesCutoff = 2.0;

}  // namespace

double erfc(double x) {
    if (std::isnan(x)) return x;
    if (x < 0.0) return 2.0 - erfc(-x);
    if (x < kSeriesCutoff) return 1.0 - erf_series(x);
    if (x > 27.3) return 0.0;
    return std::exp(-x * x) * erfc_scaled_cf(x);
}

double erf(double x) {
    if (std::isnan(x)) return x;
    if (x < 0.0) return -erf(-x);
    if (x < kSeriesCutoff) return erf_series(x);
    return 1.0 - erfc(x);
}

double expint_e1_scaled(double z) {
    if (!(z > 0.0)) throw DomainError("special", "E1 requires z > 0");
    if (z <= 1.0) {
        // E1(z) = -gamma - ln z - sum_{k>=1} (-z)^k / (k k!)
        double term = 1.0;
        double sum = 0.0;
        for (int k = 1; k < 200; ++k) {
            term *= -z / k;
            const double contrib = term / k;
            sum += contrib;
            if (std::fabs(contrib) < kEps * std::fabs(sum)) break;
        }
        return std::exp(z) * (-kEulerGamma - std::log(z) - sum);
    }
    // e^z E1(z) = 1/(z+1- 1/(z+3- 4/(z+5- ...))), modified Lentz.
    double b = z + 1.0;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        const double a = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const double delta = c * d;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) return h;
    }
    throw NumericalError("special", "E1 continued fraction did not converge");
}

double expint_e1(double z) {
    if (z > 745.0) return 0.0;
    return std::exp(-z) * expint_e1_scaled(z);
}

}  // namespace regpot::special
