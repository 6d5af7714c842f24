#pragma once

// Covariance structure of the Gaussian fields f, h, v = h/R0 and w = h + κ f.

#include <cstddef>
#include <optional>
#include <vector>

#include "randcurv/point_sets.hpp"
#include "randcurv/spectral.hpp"

namespace randcurv {

enum class FieldKind { F, H, V, W };

/// Reference curvature R0 (or Q0) as a constant or as one value per grid point.
struct ReferenceCurvature {
  double constant = 0.0;
  std::vector<double> gridded;

  static ReferenceCurvature uniform(double value) { return {value, {}}; }
  static ReferenceCurvature on_grid(std::vector<double> values) { return {0.0, std::move(values)}; }

  bool is_gridded() const { return !gridded.empty(); }
  double at(std::size_t i) const { return gridded.empty() ? constant : gridded.at(i); }
  bool nowhere_zero(std::size_t points) const;
  bool constant_sign(std::size_t points) const;
};

/// Which curvature the reference describes. For Q the w-field is h + n Q0 f
/// (h = -P f); for scalar curvature it is h + R0 f (h = Δ0 f).
enum class CurvatureKind { Scalar, Q };

struct RandomFieldSpec {
  SpectrumModel spectrum;
  CoefficientScheme scheme;
  FieldKind which = FieldKind::H;
  std::optional<ReferenceCurvature> reference;
  CurvatureKind curvature = CurvatureKind::Scalar;

  /// Throws std::invalid_argument when the combination is unusable on `grid`.
  void validate(const PointSet& grid) const;

  /// Coefficient κ(x) in w = h + κ f.
  double w_factor(std::size_t i) const;
};

/// Per-level second moments of a unit combination of modes at two points:
/// ff = E f(x)f(y), fh = E f(x)h(y), hh = E h(x)h(y) (hf = fh by symmetry of
/// each level kernel).
struct CrossCovariance {
  double ff = 0.0, fh = 0.0, hh = 0.0;
};

/// Cross moments of f and h between grid points i and j, summed over all
/// levels (sphere: Legendre series; torus: Fourier series; user: direct sum).
CrossCovariance cross_covariance(const RandomFieldSpec& spec, const PointSet& grid, std::size_t i,
                                 std::size_t j);

/// Covariance of spec.which between grid points i and j.
double covariance(const RandomFieldSpec& spec, const PointSet& grid, std::size_t i, std::size_t j);

/// Row-major N×N covariance matrix of spec.which on the grid.
std::vector<double> covariance_matrix(const RandomFieldSpec& spec, const PointSet& grid);

/// Σ_m (h-variance of level m) P_m(cos d).
double covariance_h_sphere(const RandomFieldSpec& spec, double d);

/// Σ_m (h-variance of level m)/E_m² P_m(cos d).
double covariance_f_sphere(const RandomFieldSpec& spec, double d);

struct VarianceSummary {
  double sigma2_sup = 0.0;
  std::size_t argmax = 0;
  Vec3 argmax_point{};
  double sigma2_min = 0.0;
  bool is_constant = false;
};

VarianceSummary variance_summary(const RandomFieldSpec& spec, const PointSet& grid);

/// Diagonal of the heat kernel without its constant term, Σ_j e^{-λ_j T} φ_j(x)².
struct HeatVariance {
  std::vector<double> values;  // one entry for isotropic geometries
  double sup = 0.0;
  std::size_t argmax = 0;
  int levels_used = 0;
};

/// Built-in geometries truncate adaptively (relative term < 1e-17); user
/// spectra sum every listed positive level.
HeatVariance heat_variance(const SpectrumModel& spectrum, double T);

/// E|∇f|² on S², Σ_m (h-variance of level m)/E_m (Σ c_m/E_m per eigenspace).
double gradient_variance_sphere(const RandomFieldSpec& spec);

}  // namespace randcurv
