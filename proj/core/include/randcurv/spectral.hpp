#pragma once

// Reference-geometry spectra and the coefficient sequences that weight them.

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace randcurv {

enum class Geometry { Sphere2, FlatTorus2, RoundSphere4Paneitz, UserSupplied };

/// Which operator the spectrum diagonalises: the (positive) Laplacian -Δ0 or
/// a GJMS operator P_n (Paneitz for n = 4).
enum class SpectralOperator { Laplacian, Gjms };

struct SpectralLevel {
  double eigenvalue = 0.0;
  int multiplicity = 0;
};

/// Eigenfunction values of a user-supplied spectrum on its own point set.
struct UserEigenData {
  std::size_t point_count = 0;
  std::vector<double> weights;                  // quadrature weights, sum = volume
  std::vector<std::vector<double>> positive;    // one row per positive level (multiplicity 1)
  std::vector<std::vector<double>> negative;    // one row per negative level
  std::vector<double> reference;                // optional R0 / Q0 per point
};

struct SpectrumModel {
  Geometry geometry = Geometry::Sphere2;
  SpectralOperator op = SpectralOperator::Laplacian;
  int dimension = 2;
  double volume = 0.0;
  std::vector<SpectralLevel> levels;           // nonzero, nondecreasing, level m at [m-1]
  std::vector<SpectralLevel> negative_levels;  // (μ_i > 0, mult) with P ψ = -μ ψ
  std::shared_ptr<const UserEigenData> user;

  static SpectrumModel sphere2(int max_level);
  static SpectrumModel flat_torus2(int max_level);
  static SpectrumModel round_sphere4_paneitz(int max_level);

  bool isotropic() const { return geometry != Geometry::UserSupplied; }
  int level_count() const { return static_cast<int>(levels.size()); }
  const SpectralLevel& level(int m) const;  // 1-based
  std::string name() const;
};

/// (E_m, N_m) = (m(m+1), 2m+1) for spherical harmonics of degree m >= 1.
SpectralLevel sphere_level(int m);

/// Round S⁴ Paneitz operator on degree-m harmonics: m(m+1)(m+2)(m+3) with
/// multiplicity (m+1)(m+2)(2m+3)/6.
SpectralLevel paneitz_level_s4(int m);

/// Paneitz eigenvalue Δ² + δ((2/3)R g - 2 Ric)d on an Einstein n-manifold with
/// scalar curvature R, acting on a Laplace eigenfunction with eigenvalue E.
double paneitz_eigenvalue_einstein(int n, double scalar_curvature, double laplace_eigenvalue);

/// First `count` nonzero levels |k|² of the square torus [0, 2π]², with the
/// number of integer lattice points k on each circle.
std::vector<SpectralLevel> torus_levels(int count);

enum class CoefficientRule { PowerLaw, HeatKernel, SphereNormalizedPowerLaw, Explicit };
enum class Indexing { PerEigenfunction, PerEigenspace };

inline constexpr double kDefaultTailTolerance = 1e-8;

/// Materialised coefficient sequence c_1..c_M attached to a spectrum.
///
/// PerEigenfunction: c_m multiplies every eigenfunction of level m in f
/// (f = Σ a_j c_j φ_j). PerEigenspace: c_m is the variance that level m
/// contributes to h = -L f (the unit-variance S² convention).
struct CoefficientScheme {
  CoefficientRule rule = CoefficientRule::Explicit;
  double parameter = 0.0;  // s, or T for the heat kernel
  Indexing indexing = Indexing::PerEigenfunction;
  std::vector<double> values;
  std::vector<double> negative_values;  // Gaussian scales t_i of negative levels
  int truncation = 0;
  double materialized_mass = 0.0;  // Σ_{m<=M} variance of h contributed by level m
  double tail_mass = 0.0;          // estimated variance of h beyond M
  std::optional<double> normalization;  // K for the normalised power law
  bool asymptotic_tag = false;          // Explicit schemes may declare a power-law tail
  double declared_exponent = 0.0;

  double relative_tail() const;
};

CoefficientScheme make_power_law(double s, const SpectrumModel& spectrum, int truncation,
                                 double tail_tolerance = kDefaultTailTolerance);
CoefficientScheme make_sphere_normalized(double s, int truncation,
                                         double tail_tolerance = kDefaultTailTolerance);
CoefficientScheme make_heat_kernel(double T, const SpectrumModel& spectrum, int truncation,
                                   double tail_tolerance = kDefaultTailTolerance);
CoefficientScheme make_explicit(std::vector<double> values, Indexing indexing,
                                const SpectrumModel& spectrum,
                                std::vector<double> negative_values = {});

/// Variance of h at a point contributed by level m on an isotropic geometry
/// (for user spectra: the volume average).
double level_h_variance(const CoefficientScheme& scheme, const SpectrumModel& spectrum, int m);

/// Amplitude g_m with f = Σ a g_m φ over the eigenfunctions of level m.
double mode_amplitude(const CoefficientScheme& scheme, const SpectrumModel& spectrum, int m);

enum class FieldOrder { F, H };

/// Whether the sufficient smoothness condition for the idealised series holds:
/// f (or h = -L f) ∈ C^k almost surely. nullopt when the scheme carries no
/// asymptotic rule (untagged Explicit).
std::optional<bool> classify_regularity(const CoefficientScheme& scheme,
                                        const SpectrumModel& spectrum, int k,
                                        FieldOrder field = FieldOrder::F);

std::string to_string(CoefficientRule rule);
std::string to_string(Geometry geometry);

}  // namespace randcurv
