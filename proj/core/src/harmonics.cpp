#include "randcurv/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace randcurv {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

// Normalised associated Legendre functions are evaluated in the form
// P̄_l^m(cos θ) = sin^m θ · D_l^m(cos θ), where D is a polynomial obtained by
// the standard fully-normalised recurrences. Dividing out sin^m keeps the
// φ-derivative term P̄/sin θ finite at the poles.
void real_harmonics(const Vec3& p, int L, double* values, double* grad_theta, double* grad_phi) {
  if (L < 1) throw std::invalid_argument("real_harmonics: degree must be >= 1");
  const double x = std::clamp(p[2], -1.0, 1.0);
  const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
  const double phi = std::atan2(p[1], p[0]);
  const bool grads = grad_theta && grad_phi;

  // D[m][l], l = m..L+1 (one extra degree for the θ-derivative).
  const int Lg = L + 1;
  std::vector<double> d(static_cast<std::size_t>((Lg + 1) * (Lg + 1)), 0.0);
  auto D = [&](int l, int m) -> double& { return d[static_cast<std::size_t>(m * (Lg + 1) + l)]; };

  double dmm = std::sqrt(1.0 / (4.0 * kPi));
  for (int m = 0; m <= Lg; ++m) {
    if (m > 0) dmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m));
    D(m, m) = dmm;
    if (m + 1 <= Lg) D(m + 1, m) = x * std::sqrt(2.0 * m + 3.0) * dmm;
    for (int l = m + 2; l <= Lg; ++l) {
      const double l2 = static_cast<double>(l) * l, m2 = static_cast<double>(m) * m;
      const double a = std::sqrt((4.0 * l2 - 1.0) / (l2 - m2));
      const double lm1 = l - 1.0;
      const double b = std::sqrt((lm1 * lm1 - m2) / (4.0 * lm1 * lm1 - 1.0));
      D(l, m) = a * (x * D(l - 1, m) - b * D(l - 2, m));
    }
  }

  std::vector<double> spow(static_cast<std::size_t>(Lg + 2), 1.0);
  for (int m = 1; m <= Lg + 1; ++m) spow[m] = spow[m - 1] * s;

  const double root2 = std::numbers::sqrt2;
  for (int l = 1; l <= L; ++l) {
    for (int m = 0; m <= l; ++m) {
      const double pbar = spow[m] * D(l, m);
      const double cosm = std::cos(m * phi), sinm = std::sin(m * phi);
      double dtheta = 0.0, dphi_over_s = 0.0;
      if (grads) {
        // d/dθ [s^m D_l^m(cos θ)] = m x s^{m-1} D_l^m - s^{m+1} sqrt((l+m+1)(l-m)) D_l^{m+1}
        const double first = m > 0 ? m * x * spow[m - 1] * D(l, m) : 0.0;
        const double second = m + 1 <= l
                                   ? spow[m + 1] * std::sqrt((l + m + 1.0) * (l - m)) * D(l, m + 1)
                                   : 0.0;
        dtheta = first - second;
        dphi_over_s = m > 0 ? m * spow[m - 1] * D(l, m) : 0.0;
      }
      if (m == 0) {
        const std::size_t i = harmonic_index(l, 0);
        values[i] = pbar;
        if (grads) {
          grad_theta[i] = dtheta;
          grad_phi[i] = 0.0;
        }
      } else {
        const std::size_t ic = harmonic_index(l, 2 * m - 1), is = harmonic_index(l, 2 * m);
        values[ic] = root2 * pbar * cosm;
        values[is] = root2 * pbar * sinm;
        if (grads) {
          grad_theta[ic] = root2 * dtheta * cosm;
          grad_theta[is] = root2 * dtheta * sinm;
          grad_phi[ic] = -root2 * dphi_over_s * sinm;
          grad_phi[is] = root2 * dphi_over_s * cosm;
        }
      }
    }
  }
}

std::vector<std::array<int, 2>> torus_circle_vectors(long n) {
  std::vector<std::array<int, 2>> out;
  const int r = static_cast<int>(std::sqrt(static_cast<double>(n))) + 1;
  for (int kx = -r; kx <= r; ++kx)
    for (int ky = -r; ky <= r; ++ky)
      if (static_cast<long>(kx) * kx + static_cast<long>(ky) * ky == n) out.push_back({kx, ky});
  return out;
}

std::vector<std::array<int, 2>> torus_half_vectors(long n) {
  std::vector<std::array<int, 2>> out;
  for (const auto& k : torus_circle_vectors(n))
    if (k[0] > 0 || (k[0] == 0 && k[1] > 0)) out.push_back(k);
  return out;
}

void torus_modes(const Vec3& x, long norm, double* values, double* grad_x, double* grad_y) {
  const double scale = 1.0 / (kPi * std::numbers::sqrt2);
  std::size_t i = 0;
  for (const auto& k : torus_half_vectors(norm)) {
    const double arg = k[0] * x[0] + k[1] * x[1];
    const double c = std::cos(arg) * scale, s = std::sin(arg) * scale;
    values[i] = c;
    values[i + 1] = s;
    if (grad_x && grad_y) {
      grad_x[i] = -k[0] * s;
      grad_y[i] = -k[1] * s;
      grad_x[i + 1] = k[0] * c;
      grad_y[i + 1] = k[1] * c;
    }
    i += 2;
  }
}

}  // namespace randcurv
