#pragma once

// Special functions used by the kernel closed forms.  Implemented locally
// (series + continued fraction) so the closed forms and their quadrature
// oracle share no code path.

namespace regpot::special {

/// Complementary error function, |relative error| < 2e-13 for x >= 0 and
/// full double range (underflows to 0 past x ~ 26.5).
double erfc(double x);

/// Error function.
double erf(double x);

/// Exponential integral E1(z) = int_z^inf e^{-s}/s ds for z > 0.
/// Equals the upper incomplete gamma function Gamma(0, z).
double expint_e1(double z);

/// e^{z} E1(z); finite for large z where E1 itself underflows.
double expint_e1_scaled(double z);

}  // namespace regpot::special
