#include "randcurv/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "randcurv/harmonics.hpp"

namespace randcurv {

namespace {

constexpr double kPi = std::numbers::pi;

void positive(double x, const char* what) {
  if (!(x > 0.0)) throw std::invalid_argument(std::string(what) + " must be positive");
}

}  // namespace

double borell_tis_upper(double u, double sigma, double alpha) {
  positive(sigma, "sigma");
  return std::exp(alpha * u - u * u / (2.0 * sigma * sigma));
}

double borell_tis_concentration(double u, double e_sup, double sigma) {
  positive(sigma, "sigma");
  if (!(u > e_sup)) throw std::invalid_argument("concentration bound needs u > E sup");
  const double d = u - e_sup;
  return std::exp(-d * d / (2.0 * sigma * sigma));
}

TwoSidedBound p2_two_sided(double a, double sigma_v, double C1_low, double C2_up) {
  positive(a, "a");
  positive(sigma_v, "sigma_v");
  TwoSidedBound b;
  const double g = -1.0 / (2.0 * a * a * sigma_v * sigma_v);
  b.lower = C1_low * a * std::exp(g);
  b.upper = std::exp(C2_up / a + g);
  // ln evaluated from the pieces, so the diagnostic survives underflow.
  b.lower_limit = a * a * (std::log(C1_low * a) + g);
  b.upper_limit = a * a * (C2_up / a + g);
  b.limit = -1.0 / (2.0 * sigma_v * sigma_v);
  return b;
}

TwoSidedBound q_sign_bounds(double a, double sigma_v, double C1_low, double C2_up) {
  return p2_two_sided(a, sigma_v, C1_low, C2_up);
}

double mills_lower_constant(double sigma_v, double a_max) {
  positive(sigma_v, "sigma_v");
  positive(a_max, "a_max");
  return sigma_v / (std::sqrt(2.0 * kPi) * (1.0 + a_max * a_max * sigma_v * sigma_v));
}

double concentration_alpha(double e_sup, double sigma_v) {
  positive(sigma_v, "sigma_v");
  return std::max(0.0, e_sup) / (sigma_v * sigma_v);
}

double heat_sigma_small_T(double T, int n, double inf_R0_sq) {
  positive(T, "T");
  positive(inf_R0_sq, "inf R0²");
  if (n < 1) throw std::invalid_argument("dimension must be positive");
  return 1.0 / (std::pow(4.0 * kPi * T, n / 2.0) * inf_R0_sq);
}

LargeTAsymptote heat_sigma_large_T(const SpectrumModel& spectrum, const ReferenceCurvature& R0,
                                   double T) {
  LargeTAsymptote out;
  const auto& first = spectrum.level(1);
  out.lambda1 = first.eigenvalue;
  switch (spectrum.geometry) {
    case Geometry::Sphere2:
    case Geometry::FlatTorus2:
    case Geometry::RoundSphere4Paneitz: {
      if (R0.is_gridded()) throw std::invalid_argument("homogeneous geometries take a constant R0");
      positive(std::abs(R0.constant), "|R0|");
      out.multiplicity = first.multiplicity;
      out.F = first.multiplicity / (spectrum.volume * R0.constant * R0.constant);
      break;
    }
    case Geometry::UserSupplied: {
      const auto& data = *spectrum.user;
      int m = 0;
      while (m < spectrum.level_count() &&
             std::abs(spectrum.level(m + 1).eigenvalue - out.lambda1) <= 1e-9 * out.lambda1)
        ++m;
      out.multiplicity = m;
      for (std::size_t i = 0; i < data.point_count; ++i) {
        double s = 0.0;
        for (int j = 0; j < m; ++j) s += data.positive[j][i] * data.positive[j][i];
        const double r = R0.at(i);
        positive(std::abs(r), "|R0|");
        out.F = std::max(out.F, s / (r * r));
      }
      break;
    }
  }
  out.asymptote = out.F * std::exp(-out.lambda1 * T);
  return out;
}

double heat_sigma_v(const SpectrumModel& spectrum, const ReferenceCurvature& R0, double T) {
  const HeatVariance hv = heat_variance(spectrum, T);
  double best = 0.0;
  if (hv.values.size() == 1) {
    if (R0.is_gridded()) {
      double inf = std::numeric_limits<double>::infinity();
      for (double r : R0.gridded) inf = std::min(inf, r * r);
      return hv.values[0] / inf;
    }
    return hv.values[0] / (R0.constant * R0.constant);
  }
  for (std::size_t i = 0; i < hv.values.size(); ++i) {
    const double r = R0.at(i);
    best = std::max(best, hv.values[i] / (r * r));
  }
  return best;
}

Ordering compare_small_T(double a, double b) {
  positive(a, "inf R0² (A)");
  positive(b, "inf R0² (B)");
  if (a == b) return Ordering::Incomparable;
  return a < b ? Ordering::FirstLarger : Ordering::SecondLarger;
}

Ordering compare_large_T(double a, double b) {
  positive(a, "lambda1 (A)");
  positive(b, "lambda1 (B)");
  if (a == b) return Ordering::Incomparable;
  return a < b ? Ordering::FirstLarger : Ordering::SecondLarger;
}

std::string to_string(Ordering ordering) {
  switch (ordering) {
    case Ordering::FirstLarger: return "first";
    case Ordering::SecondLarger: return "second";
    case Ordering::Incomparable: return "incomparable";
  }
  return "incomparable";
}

LinfAsymptote linf_log_asymptote(double u, double a, double sigma_w) {
  positive(u, "u");
  positive(a, "a");
  positive(sigma_w, "sigma_w");
  LinfAsymptote out;
  out.value = -u * u / (2.0 * a * a * sigma_w * sigma_w);
  if (u >= 0.5) out.flags.push_back("u >= 0.5: small-u hypothesis not met");
  if (u / a <= 3.0) out.flags.push_back("u/a <= 3: u/a -> infinity hypothesis not met");
  out.regime_ok = out.flags.empty();
  return out;
}

double nd_negative_bound(double a, int n, double sigma_v, double alpha) {
  if (n <= 2) throw std::invalid_argument("nd_negative_bound needs n > 2");
  positive(a, "a");
  positive(sigma_v, "sigma_v");
  const double k = n - 1.0;
  return std::exp(alpha / (a * k) - 1.0 / (2.0 * a * a * k * k * sigma_v * sigma_v));
}

NdConstants nd_positive_constants(int n, double sigma_v, double sigma_2) {
  if (n <= 2) throw std::invalid_argument("nd_positive_constants needs n > 2");
  positive(sigma_v, "sigma_v");
  positive(sigma_2, "sigma_2");
  NdConstants c;
  c.kappa = 4.0 * sigma_v * sigma_v * (n - 1.0) / (sigma_2 * n * (n - 2.0));
  const double root = std::sqrt(c.kappa * c.kappa + 4.0 * c.kappa);
  // δ0 = (root - κ)/2 = 2κ/(root + κ) and 1 - δ0 = 2/(2 + κ + root).
  c.delta0 = 2.0 * c.kappa / (root + c.kappa);
  c.one_minus_delta0 = 2.0 / (2.0 + c.kappa + root);
  const double denom = sigma_2 * n * (n - 1.0) * (n - 2.0);
  c.B = 2.0 * c.one_minus_delta0 / denom;
  c.exponent_negative = c.delta0 * c.delta0 / (2.0 * (n - 1.0) * (n - 1.0) * sigma_v * sigma_v);
  c.exponent_positive = 2.0 * c.one_minus_delta0 / denom;
  return c;
}

double q_sigma_v_single_level(double t, double lambda, int multiplicity, double volume, double Q0) {
  positive(volume, "volume");
  if (Q0 == 0.0) throw std::invalid_argument("Q0 must be nonzero");
  return t * t * lambda * lambda * multiplicity / (volume * Q0 * Q0);
}

}  // namespace randcurv
