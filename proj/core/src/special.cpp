#include "randcurv/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace randcurv {

double legendre(int m, double t) {
  if (m < 0) throw std::domain_error("legendre: negative degree");
  if (!(std::abs(t) <= 1.0 + 1e-12))
    throw std::domain_error("legendre: argument " + std::to_string(t) + " outside [-1, 1]");
  t = std::clamp(t, -1.0, 1.0);
  if (m == 0) return 1.0;
  double p0 = 1.0;
  double p1 = t;
  for (int k = 2; k <= m; ++k) {
    const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double gaussian_tail(double u) { return 0.5 * std::erfc(u / std::numbers::sqrt2); }

double gaussian_density(double u) {
  return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
}

namespace {
constexpr long kZetaTerms = 2000;
}

double zeta_tail(double s, long n) {
  if (!(s > 1.0)) throw std::domain_error("zeta: requires s > 1");
  if (n < 0) throw std::domain_error("zeta_tail: negative term count");
  // Sum explicitly up to kZetaTerms, then Euler-Maclaurin for Σ_{m>N} m^{-s}:
  // ∫_N^∞ x^{-s} dx - N^{-s}/2 - s N^{-s-1}/12 + s(s+1)(s+2) N^{-s-3}/720.
  const long big = std::max(n, kZetaTerms);
  const double bn = static_cast<double>(big);
  double tail = std::pow(bn, 1.0 - s) / (s - 1.0) - 0.5 * std::pow(bn, -s) +
                s * std::pow(bn, -s - 1.0) / 12.0 -
                s * (s + 1.0) * (s + 2.0) * std::pow(bn, -s - 3.0) / 720.0;
  // smallest terms first
  for (long m = big; m > n; --m) tail += std::pow(static_cast<double>(m), -s);
  return tail;
}

double zeta(double s) {
  if (!(s > 1.0)) throw std::domain_error("zeta: requires s > 1");
  return zeta_tail(s, 0);
}

}  // namespace randcurv
