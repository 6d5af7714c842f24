#pragma once

// Conformal transformation laws applied to sampled conformal factors.

#include <vector>

#include "randcurv/fields.hpp"
#include "randcurv/point_sets.hpp"
#include "randcurv/sampler.hpp"

namespace randcurv {

/// g1 = e^{af} g0 for scalar curvature, g1 = e^{2af} g0 for Q-curvature.
enum class Convention { ScalarExpAF, QExp2AF };

struct PerturbationParams {
  double a = 0.0;
  int n = 2;
  Convention convention = Convention::ScalarExpAF;

  void validate() const;
};

struct CurvatureField {
  std::vector<double> values;     // R1 or Q1
  std::vector<double> reference;  // R0 or Q0
  std::vector<int> sign;          // -1, 0, +1 of values
};

/// R1 = e^{-af}(R0 - a h) with h = Δ0 f.
CurvatureField scalar_curvature_2d(const ReferenceCurvature& R0, const FieldSample& sample,
                                   double a);

/// R1 = e^{-af}[R0 - a(n-1)h - a²(n-1)(n-2)|∇f|²/4].
CurvatureField scalar_curvature_nd(const ReferenceCurvature& R0, const FieldSample& sample,
                                   double a, int n);

/// Q1 = e^{-naf}(Q0 - a h) with h = -P f.
CurvatureField q_curvature(const ReferenceCurvature& Q0, const FieldSample& sample, double a, int n);

/// Bracket R0 - a(n-1)h - a²(n-1)(n-2)|∇f|²/4 whose sign is the sign of R1.
double scalar_bracket(double R0, double h, double gradsq, double a, int n);

/// Q-curvature of the round S⁴ from (-1/12)(ΔR - R² + 3|Ric|²) with R = 12
/// and Ric = 3g.
double round_s4_q_curvature();

/// Q-curvature in dimension 4 from ΔR, R and |Ric|².
double q_curvature_dim4(double laplacian_R, double R, double ric_norm_sq);

/// E[V1] = ∫ e^{n²a² r_f(x,x)/8} dV0, exact on isotropic geometries and by grid
/// quadrature otherwise. spec.which is ignored; the f-variance is used.
double expected_volume(const RandomFieldSpec& spec, const PointSet& grid, double a, int n);

/// ∫ e^{naf/2} dV0 for one sample by grid quadrature.
double sample_volume(const FieldSample& sample, const PointSet& grid, double a, int n);

enum class DeviationMode { Scalar2D, Q };

struct DeviationField {
  std::vector<double> exact;       // R1 - R0 or Q1 - Q0
  std::vector<double> linearized;  // -a w with w = h + R0 f (Q: h + n Q0 f)
  double max_abs_exact = 0.0;
  double max_abs_difference = 0.0;
};

/// Scalar2D: R1 - R0 = R0(e^{-af} - 1) - a e^{-af} h.
/// Q:        Q1 - Q0 = Q0(e^{-naf} - 1) - a e^{-naf} h.
DeviationField deviation_field(const FieldSample& sample, const ReferenceCurvature& reference,
                               double a, int n, DeviationMode mode);

}  // namespace randcurv
