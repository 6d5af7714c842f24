#pragma once

// Scalar special functions used throughout the library.

namespace randcurv {

/// Legendre polynomial P_m(t) by the three-term recurrence.
/// Arguments within 1e-12 of [-1, 1] are clamped; anything further out throws
/// std::domain_error.
double legendre(int m, double t);

/// Upper Gaussian tail Ψ(u) = (2π)^{-1/2} ∫_u^∞ e^{-t²/2} dt.
double gaussian_tail(double u);

/// Standard normal density.
double gaussian_density(double u);

/// Riemann zeta for real s > 1: explicit summation plus an Euler-Maclaurin tail.
double zeta(double s);

/// Σ_{m > n} m^{-s}, the zeta tail beyond n terms (s > 1, n >= 0).
double zeta_tail(double s, long n);

}  // namespace randcurv
