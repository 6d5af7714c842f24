#pragma once

// Monte Carlo excursion estimates and the expected-Euler-characteristic
// machinery on S².

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "randcurv/curvature.hpp"
#include "randcurv/fields.hpp"
#include "randcurv/point_sets.hpp"
#include "randcurv/sampler.hpp"
#include "randcurv/spectral.hpp"

namespace randcurv {

struct McOptions {
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  std::uint64_t first_draw = 0;
  unsigned workers = 1;
};

struct ExcursionReport {
  double estimate = 0.0;
  double standard_error = 0.0;  // sqrt(p(1-p)/N)
  std::size_t n_samples = 0;
  std::size_t events = 0;
  double threshold = 0.0;       // u (for P2: 1/a)
  double amplitude = 0.0;       // a
  std::size_t grid_size = 0;
  std::uint64_t seed = 0;
  std::uint64_t first_draw = 0;
  std::optional<double> refinement_delta;  // estimate on the refined grid minus this one
  std::vector<std::string> warnings;
};

ExcursionReport make_report(std::size_t events, std::size_t samples);

/// Per-draw one-sided supremum over the grid of spec.which (F, H, V or W).
std::vector<double> sample_suprema(const RandomFieldSpec& spec, const PointSet& grid,
                                   const McOptions& options);

/// Fraction of draws with sup_grid v > 1/a, one report per amplitude. The
/// event is the sign-change event of R1 (or Q1) for either sign of R0:
/// R1 = e^{-af} R0 (1 - a v), and e^{-af} R0 has constant sign. When `refined`
/// is given the same draws are evaluated there and refinement_delta is set.
/// `suprema` receives the per-draw sup of v on `grid`.
std::vector<ExcursionReport> estimate_p2(const RandomFieldSpec& spec,
                                         const std::vector<double>& amplitudes,
                                         const PointSet& grid, const McOptions& options,
                                         const PointSet* refined = nullptr,
                                         std::vector<double>* suprema = nullptr);

/// Second evaluation of the same event: min over the grid of 1 - a v < 0.
bool sign_change_event(const FieldSample& sample, const ReferenceCurvature& reference, double a);

struct LinfPoint {
  double a = 0.0;
  double u = 0.0;
};

/// Fraction of draws with max over the grid of |exact deviation| > u.
std::vector<ExcursionReport> estimate_linf(const RandomFieldSpec& spec,
                                           const std::vector<LinfPoint>& points,
                                           const PointSet& grid, const McOptions& options,
                                           DeviationMode mode, const PointSet* refined = nullptr);

/// Counts χ = #V - #E + #F of the super-level set {value >= u} on a fixed
/// closed triangulation (validated once at construction).
class EulerCounter {
 public:
  explicit EulerCounter(const Triangulation& mesh);

  /// Thresholds that coincide with a vertex value are moved up by 1e-12;
  /// a note is appended to `notes` when given.
  int count(const std::vector<double>& values, double u,
            std::vector<std::string>* notes = nullptr) const;

 private:
  std::size_t vertices_ = 0;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<int, 3>> faces_;
};

int empirical_euler(const Triangulation& mesh, const std::vector<double>& values, double u);

struct LipschitzKilling {
  double L0 = 2.0;
  double L1 = 0.0;
  double L2 = 0.0;
};

/// Adler-Taylor metric constant C with g^AT = C·I: Σ_m (h-variance of level m) E_m / 2.
double at_metric_constant(const CoefficientScheme& scheme, const SpectrumModel& spectrum);
double at_metric_constant(const CoefficientScheme& scheme);  // per-eigenspace on S²

/// L0 = χ(S²) = 2, L1 = 0, L2 = area of S² in g^AT = 4πC.
LipschitzKilling lipschitz_killing(const CoefficientScheme& scheme, const SpectrumModel& spectrum);

/// 2Ψ(u) + L2 (2π)^{-3/2} u e^{-u²/2}. Throws unless the scheme has unit
/// variance (materialised plus tail within 1e-6 of 1).
double predicted_euler(const CoefficientScheme& scheme, const SpectrumModel& spectrum, double u);
double predicted_euler(const CoefficientScheme& scheme, double u);

struct EulerCurve {
  std::vector<double> thresholds;
  std::vector<double> mean;
  std::vector<double> standard_error;
  std::vector<double> predicted;
  LipschitzKilling lk;
  std::size_t n_samples = 0;
  std::vector<std::string> notes;
};

/// Empirical mean χ of the h-field excursion sets over the mesh vertices,
/// joined with the prediction.
EulerCurve euler_curve(const RandomFieldSpec& spec, const Triangulation& mesh,
                       const std::vector<double>& thresholds, const McOptions& options);

struct SphereP2Prediction {
  double value = 0.0;
  double C1 = 2.0;
  double C2 = 0.0;
  std::vector<std::string> warnings;
};

/// C1 Ψ(1/a) + (C2/a) e^{-1/(2a²)}, C1 = 2, C2 = (2π)^{-1/2} Σ c_m E_m.
SphereP2Prediction sphere_p2_prediction(const CoefficientScheme& scheme, double a);

using Matrix5 = std::array<std::array<double, 5>, 5>;
using Matrix3 = std::array<std::array<double, 3>, 3>;

/// Ω^m = (E/8)·[[3E-2, E+2, 0], [E+2, 3E-2, 0], [0, 0, E-2]].
Matrix3 omega_block(double E);

/// C_m = blockdiag((E/2) I₂, Ω^m).
Matrix5 level_covariance_block(double E);

struct Attainability {
  Matrix5 matrix{};
  double min_eigenvalue = 0.0;
  double trace = 0.0;
  bool positive_definite = false;
};

/// Σ_{m<=M} c_m C_m with a symmetric eigenvalue check (M <= scheme truncation).
Attainability attainability_matrix(const CoefficientScheme& scheme, int truncation);
Attainability attainability_of(const Matrix5& matrix);

/// True iff some odd level carries a positive coefficient.
bool degeneracy_check(const CoefficientScheme& scheme);

}  // namespace randcurv
