#include "randcurv/curvature.hpp"

#include <cmath>
#include <stdexcept>

namespace randcurv {

namespace {

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

void need(const std::vector<double>& v, std::size_t n, const char* what) {
  if (v.size() != n || n == 0) throw std::invalid_argument(std::string("sample lacks ") + what);
}

}  // namespace

void PerturbationParams::validate() const {
  if (!(a > 0.0)) throw std::invalid_argument("amplitude a must be positive");
  if (n < 2) throw std::invalid_argument("dimension must be >= 2");
  if (convention == Convention::QExp2AF && (n < 4 || n % 2 != 0))
    throw std::invalid_argument("Q-curvature needs even n >= 4");
}

double scalar_bracket(double R0, double h, double gradsq, double a, int n) {
  return R0 - a * (n - 1) * h - a * a * (n - 1) * (n - 2) * gradsq / 4.0;
}

CurvatureField scalar_curvature_2d(const ReferenceCurvature& R0, const FieldSample& sample,
                                   double a) {
  const std::size_t P = sample.h.size();
  need(sample.h, P, "h");
  need(sample.f, P, "f");
  CurvatureField out;
  out.values.resize(P);
  out.reference.resize(P);
  out.sign.resize(P);
  for (std::size_t i = 0; i < P; ++i) {
    const double r0 = R0.at(i);
    out.reference[i] = r0;
    out.values[i] = std::exp(-a * sample.f[i]) * (r0 - a * sample.h[i]);
    out.sign[i] = sign_of(out.values[i]);
  }
  return out;
}

CurvatureField scalar_curvature_nd(const ReferenceCurvature& R0, const FieldSample& sample,
                                   double a, int n) {
  if (n < 2) throw std::invalid_argument("dimension must be >= 2");
  if (n == 2) return scalar_curvature_2d(R0, sample, a);
  const std::size_t P = sample.h.size();
  need(sample.h, P, "h");
  need(sample.f, P, "f");
  need(sample.gradsq, P, "|∇f|² (required for n > 2)");
  CurvatureField out;
  out.values.resize(P);
  out.reference.resize(P);
  out.sign.resize(P);
  for (std::size_t i = 0; i < P; ++i) {
    const double r0 = R0.at(i);
    out.reference[i] = r0;
    out.values[i] = std::exp(-a * sample.f[i]) * scalar_bracket(r0, sample.h[i], sample.gradsq[i], a, n);
    out.sign[i] = sign_of(out.values[i]);
  }
  return out;
}

CurvatureField q_curvature(const ReferenceCurvature& Q0, const FieldSample& sample, double a, int n) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("Q-curvature needs even dimension");
  const std::size_t P = sample.h.size();
  need(sample.h, P, "h");
  need(sample.f, P, "f");
  CurvatureField out;
  out.values.resize(P);
  out.reference.resize(P);
  out.sign.resize(P);
  for (std::size_t i = 0; i < P; ++i) {
    const double q0 = Q0.at(i);
    out.reference[i] = q0;
    out.values[i] = std::exp(-n * a * sample.f[i]) * (q0 - a * sample.h[i]);
    out.sign[i] = sign_of(out.values[i]);
  }
  return out;
}

double q_curvature_dim4(double laplacian_R, double R, double ric_norm_sq) {
  return -(laplacian_R - R * R + 3.0 * ric_norm_sq) / 12.0;
}

double round_s4_q_curvature() {
  // Ric = 3g on the unit S⁴: R = 12, |Ric|² = 9·4 = 36, ΔR = 0.
  return q_curvature_dim4(0.0, 12.0, 36.0);
}

double expected_volume(const RandomFieldSpec& spec, const PointSet& grid, double a, int n) {
  RandomFieldSpec fspec = spec;
  fspec.which = FieldKind::F;
  fspec.validate(grid);
  double sum = 0.0;
  if (spec.spectrum.isotropic()) {
    // Constant integrand: exact volume instead of the quadrature sum.
    const double rf = covariance(fspec, grid, 0, 0);
    sum = spec.spectrum.volume * std::exp(n * n * a * a * rf / 8.0);
  } else {
    for (std::size_t i = 0; i < grid.size(); ++i)
      sum += grid.weights[i] * std::exp(n * n * a * a * covariance(fspec, grid, i, i) / 8.0);
  }
  return sum;
}

double sample_volume(const FieldSample& sample, const PointSet& grid, double a, int n) {
  need(sample.f, grid.size(), "f");
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    sum += grid.weights[i] * std::exp(n * a * sample.f[i] / 2.0);
  return sum;
}

DeviationField deviation_field(const FieldSample& sample, const ReferenceCurvature& reference,
                               double a, int n, DeviationMode mode) {
  const std::size_t P = sample.h.size();
  need(sample.h, P, "h");
  need(sample.f, P, "f");
  if (mode == DeviationMode::Scalar2D && n != 2)
    throw std::invalid_argument("Scalar2D deviation needs n = 2");
  if (mode == DeviationMode::Q && (n < 2 || n % 2 != 0))
    throw std::invalid_argument("Q deviation needs even n");
  const double scale = mode == DeviationMode::Q ? n : 1.0;
  DeviationField out;
  out.exact.resize(P);
  out.linearized.resize(P);
  for (std::size_t i = 0; i < P; ++i) {
    const double r0 = reference.at(i);
    const double e = std::exp(-scale * a * sample.f[i]);
    out.exact[i] = r0 * (e - 1.0) - a * e * sample.h[i];
    out.linearized[i] = -a * (sample.h[i] + scale * r0 * sample.f[i]);
    out.max_abs_exact = std::max(out.max_abs_exact, std::abs(out.exact[i]));
    out.max_abs_difference =
        std::max(out.max_abs_difference, std::abs(out.exact[i] - out.linearized[i]));
  }
  return out;
}

}  // namespace randcurv
