#pragma once

// Closed-form bounds and asymptotics, as pure functions of their constants.

#include <string>
#include <utility>
#include <vector>

#include "randcurv/fields.hpp"
#include "randcurv/special.hpp"
#include "randcurv/spectral.hpp"

namespace randcurv {

/// e^{αu - u²/(2σ²)}.
double borell_tis_upper(double u, double sigma, double alpha);

/// exp(-(u - E sup)²/(2σ²)); throws unless u > e_sup.
double borell_tis_concentration(double u, double e_sup, double sigma);

struct TwoSidedBound {
  double lower = 0.0;
  double upper = 0.0;
  double lower_limit = 0.0;  // a² ln(lower)
  double upper_limit = 0.0;  // a² ln(upper)
  double limit = 0.0;        // -1/(2σ_v²)
};

/// (C1 a) e^{-1/(2a²σ²)} <= P2(a) <= e^{C2/a - 1/(2a²σ²)}.
TwoSidedBound p2_two_sided(double a, double sigma_v, double C1_low, double C2_up);

/// Same functional form for the Q-curvature sign-change probability.
TwoSidedBound q_sign_bounds(double a, double sigma_v, double C1_low, double C2_up);

/// Constant C1 valid for every a <= a_max from P2 >= Ψ(1/(aσ)) and the Mills
/// ratio bound Ψ(t) >= φ(t) t/(1+t²): σ/(√(2π)(1 + a_max²σ²)).
double mills_lower_constant(double sigma_v, double a_max);

/// α = E[sup v]/σ_v², the exponent constant implied by the concentration form.
double concentration_alpha(double e_sup, double sigma_v);

/// 1/((4πT)^{n/2} inf R0²).
double heat_sigma_small_T(double T, int n, double inf_R0_sq);

struct LargeTAsymptote {
  double F = 0.0;        // sup_x Σ_{j<=m(λ1)} φ_j(x)²/R0(x)²
  double lambda1 = 0.0;
  int multiplicity = 0;
  double asymptote = 0.0;  // F e^{-λ1 T}
};

/// Built-in geometries use the addition theorem (S²: N1/(4π R0²)); user
/// spectra group the leading equal eigenvalues (relative tolerance 1e-9).
LargeTAsymptote heat_sigma_large_T(const SpectrumModel& spectrum, const ReferenceCurvature& R0,
                                   double T);

/// σ_v²(T) = sup_x e*(x,x,T)/R0(x)² from the spectral sum.
double heat_sigma_v(const SpectrumModel& spectrum, const ReferenceCurvature& R0, double T);

enum class Ordering { FirstLarger, SecondLarger, Incomparable };

/// Small T: the metric with the smaller inf R0² has the larger P2.
Ordering compare_small_T(double inf_R0sq_A, double inf_R0sq_B);

/// Large T: the metric with the smaller λ1 has the larger P2.
Ordering compare_large_T(double lambda1_A, double lambda1_B);

std::string to_string(Ordering ordering);

struct LinfAsymptote {
  double value = 0.0;  // -u²/(2a²σ_w²)
  bool regime_ok = true;
  std::vector<std::string> flags;
};

LinfAsymptote linf_log_asymptote(double u, double a, double sigma_w);

/// exp(α/(a(n-1)) - 1/(2a²(n-1)²σ_v²)), n > 2.
double nd_negative_bound(double a, int n, double sigma_v, double alpha);

struct NdConstants {
  double kappa = 0.0;
  double delta0 = 0.0;
  double one_minus_delta0 = 0.0;
  double B = 0.0;
  double exponent_negative = 0.0;  // δ0²/(2(n-1)²σ_v²)
  double exponent_positive = 0.0;  // 2(1-δ0)/(σ2 n(n-1)(n-2))
};

/// κ = 4σ_v²(n-1)/(σ2 n(n-2)), δ0 the root in (0,1) of δ² + κδ - κ = 0 and
/// B = (2 + κ - √(κ²+4κ))/(σ2 n(n-1)(n-2)), evaluated in cancellation-free form.
NdConstants nd_positive_constants(int n, double sigma_v, double sigma_2);

/// σ_v² of the Q-field for a single positive Paneitz level with scale t on a
/// homogeneous space: t² λ² N/(|M| Q0²).
double q_sigma_v_single_level(double t, double lambda, int multiplicity, double volume, double Q0);

/// Evaluated bound with every input recorded.
struct BoundReport {
  std::string kind;
  std::vector<std::pair<std::string, double>> inputs;
  std::vector<std::pair<std::string, double>> values;
  std::vector<std::string> flags;
};

}  // namespace randcurv
