#include "randcurv/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

#include "randcurv/special.hpp"

namespace randcurv {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

// Levels of a built-in geometry, generated past the truncation for tail sums.
std::vector<SpectralLevel> builtin_levels(Geometry g, int count) {
  std::vector<SpectralLevel> out;
  switch (g) {
    case Geometry::Sphere2:
      for (int m = 1; m <= count; ++m) out.push_back(sphere_level(m));
      break;
    case Geometry::RoundSphere4Paneitz:
      for (int m = 1; m <= count; ++m) out.push_back(paneitz_level_s4(m));
      break;
    case Geometry::FlatTorus2:
      out = torus_levels(count);
      break;
    case Geometry::UserSupplied:
      throw std::logic_error("builtin_levels: user spectrum");
  }
  return out;
}

// Per-eigenfunction h-variance density G(λ) = c(λ)² λ² / V for rule-generated
// coefficients (0 for rules without a closed form).
double rule_mode_variance(CoefficientRule rule, double param, double lambda, double volume) {
  switch (rule) {
    case CoefficientRule::PowerLaw: {
      const double c = std::pow(lambda, -param);
      return c * c * lambda * lambda / volume;
    }
    case CoefficientRule::HeatKernel:
      return std::exp(-lambda * param) / volume;
    default:
      return 0.0;
  }
}

// Local power-law exponent p of g(x) ~ x^{-p} from two samples.
double local_exponent(double g_half, double g_full) {
  if (g_full <= 0.0 || g_half <= 0.0) return std::numeric_limits<double>::infinity();
  return std::log(g_half / g_full) / std::log(2.0);
}

// Tail Σ_{m > M} of the h-variance for a per-eigenfunction rule on a built-in
// geometry: explicit summation over a long stretch, then an integral envelope.
double per_eigenfunction_tail(CoefficientRule rule, double param, const SpectrumModel& spectrum,
                              int truncation) {
  const double vol = spectrum.volume;
  int stretch = std::max(4 * truncation, 4000);
  for (int attempt = 0; attempt < 6; ++attempt, stretch *= 4) {
    const auto levels = builtin_levels(spectrum.geometry, stretch);
    double tail = 0.0;
    double materialized = 0.0;
    for (int m = static_cast<int>(levels.size()); m >= 1; --m) {
      const double term = levels[m - 1].multiplicity *
                          rule_mode_variance(rule, param, levels[m - 1].eigenvalue, vol);
      if (m > truncation) tail += term;
      else materialized += term;
    }
    const double last_lambda = levels.back().eigenvalue;
    const double last_term =
        levels.back().multiplicity * rule_mode_variance(rule, param, last_lambda, vol);
    if (rule == CoefficientRule::HeatKernel) {
      if (last_term <= 1e-30 * (materialized + tail)) return tail;
      continue;  // lengthen the stretch
    }
    // Power law: integrate the smooth envelope in λ beyond the stretch.
    // Level counting density dN/dλ: S² ~ 1 per unit λ (N_m dm with dλ = (2m+1) dm),
    // T² ~ π, S⁴ Paneitz: N_m dm with dλ ≈ 4 m³ dm.
    const double g_full = rule_mode_variance(rule, param, last_lambda, vol);
    const double g_half = rule_mode_variance(rule, param, last_lambda / 2.0, vol);
    double density_exp = 0.0;  // dN/dλ ~ λ^{density_exp}
    double density_coeff = 1.0;
    switch (spectrum.geometry) {
      case Geometry::Sphere2: density_exp = 0.0; density_coeff = 1.0; break;
      case Geometry::FlatTorus2: density_exp = 0.0; density_coeff = kPi; break;
      case Geometry::RoundSphere4Paneitz: density_exp = 0.0; density_coeff = 1.0 / 12.0; break;
      default: break;
    }
    const double p = local_exponent(g_half, g_full) - density_exp;
    if (!(p > 1.0 + 1e-9))
      throw std::invalid_argument("coefficient series for h diverges (variance of h infinite)");
    tail += density_coeff * g_full * last_lambda / (p - 1.0);
    return tail;
  }
  throw std::invalid_argument("coefficient tail did not converge");
}

double total_variance_check(const CoefficientScheme& sc, double tol) {
  const double rel = sc.relative_tail();
  if (rel > tol)
    throw std::invalid_argument("truncation M=" + std::to_string(sc.truncation) +
                                " leaves relative tail mass " + std::to_string(rel) +
                                " above tolerance " + std::to_string(tol));
  return rel;
}

void fill_masses(CoefficientScheme& sc, const SpectrumModel& spectrum) {
  sc.materialized_mass = 0.0;
  for (int m = 1; m <= sc.truncation; ++m) sc.materialized_mass += level_h_variance(sc, spectrum, m);
}

}  // namespace

const SpectralLevel& SpectrumModel::level(int m) const {
  if (m < 1 || m > level_count())
    throw std::out_of_range("spectrum level " + std::to_string(m) + " out of range");
  return levels[static_cast<std::size_t>(m - 1)];
}

std::string SpectrumModel::name() const { return to_string(geometry); }

SpectrumModel SpectrumModel::sphere2(int max_level) {
  require(max_level >= 1, "sphere2: need at least one level");
  SpectrumModel s;
  s.geometry = Geometry::Sphere2;
  s.dimension = 2;
  s.volume = 4.0 * kPi;
  s.levels = builtin_levels(Geometry::Sphere2, max_level);
  return s;
}

SpectrumModel SpectrumModel::flat_torus2(int max_level) {
  require(max_level >= 1, "flat_torus2: need at least one level");
  SpectrumModel s;
  s.geometry = Geometry::FlatTorus2;
  s.dimension = 2;
  s.volume = 4.0 * kPi * kPi;
  s.levels = torus_levels(max_level);
  return s;
}

SpectrumModel SpectrumModel::round_sphere4_paneitz(int max_level) {
  require(max_level >= 1, "round_sphere4_paneitz: need at least one level");
  SpectrumModel s;
  s.geometry = Geometry::RoundSphere4Paneitz;
  s.op = SpectralOperator::Gjms;
  s.dimension = 4;
  s.volume = 8.0 * kPi * kPi / 3.0;
  s.levels = builtin_levels(Geometry::RoundSphere4Paneitz, max_level);
  return s;
}

SpectralLevel sphere_level(int m) {
  require(m >= 1, "sphere_level: m must be >= 1 (constants are excluded)");
  return {static_cast<double>(m) * (m + 1), 2 * m + 1};
}

SpectralLevel paneitz_level_s4(int m) {
  require(m >= 1, "paneitz_level_s4: m must be >= 1 (constants are excluded)");
  const double md = m;
  return {md * (md + 1) * (md + 2) * (md + 3), (m + 1) * (m + 2) * (2 * m + 3) / 6};
}

double paneitz_eigenvalue_einstein(int n, double scalar_curvature, double laplace_eigenvalue) {
  // Ric = (R/n) g, so δ((2/3)R g - 2 Ric) d = ((2/3)R - 2R/n) Δ on functions.
  const double coeff = (2.0 / 3.0) * scalar_curvature - 2.0 * scalar_curvature / n;
  return laplace_eigenvalue * laplace_eigenvalue + coeff * laplace_eigenvalue;
}

std::vector<SpectralLevel> torus_levels(int count) {
  require(count >= 1, "torus_levels: count must be positive");
  // Grow the radius until `count` distinct norms are complete.
  long radius = 8;
  while (true) {
    std::map<long, int> points;
    const long r2max = radius * radius;
    for (long kx = -radius; kx <= radius; ++kx)
      for (long ky = -radius; ky <= radius; ++ky) {
        const long n = kx * kx + ky * ky;
        if (n > 0 && n <= r2max) ++points[n];
      }
    if (static_cast<long>(points.size()) >= count) {
      std::vector<SpectralLevel> out;
      for (const auto& [n, mult] : points) {
        out.push_back({static_cast<double>(n), mult});
        if (static_cast<int>(out.size()) == count) break;
      }
      return out;
    }
    radius *= 2;
  }
}

double CoefficientScheme::relative_tail() const {
  const double total = materialized_mass + tail_mass;
  return total > 0.0 ? tail_mass / total : 0.0;
}

CoefficientScheme make_power_law(double s, const SpectrumModel& spectrum, int truncation,
                                 double tail_tolerance) {
  require(s > 0.0, "power law requires s > 0");
  require(truncation >= 1, "truncation M must be >= 1");
  require(truncation <= spectrum.level_count(), "truncation exceeds available spectrum levels");
  CoefficientScheme sc;
  sc.rule = CoefficientRule::PowerLaw;
  sc.parameter = s;
  sc.indexing = Indexing::PerEigenfunction;
  sc.truncation = truncation;
  for (int m = 1; m <= truncation; ++m)
    sc.values.push_back(std::pow(spectrum.level(m).eigenvalue, -s));
  fill_masses(sc, spectrum);
  sc.tail_mass = spectrum.isotropic()
                     ? per_eigenfunction_tail(CoefficientRule::PowerLaw, s, spectrum, truncation)
                     : 0.0;
  total_variance_check(sc, tail_tolerance);
  return sc;
}

CoefficientScheme make_sphere_normalized(double s, int truncation, double tail_tolerance) {
  require(s > 1.0, "normalized power law requires s > 1");
  require(truncation >= 1, "truncation M must be >= 1");
  CoefficientScheme sc;
  sc.rule = CoefficientRule::SphereNormalizedPowerLaw;
  sc.parameter = s;
  sc.indexing = Indexing::PerEigenspace;
  sc.truncation = truncation;
  const double k = 1.0 / zeta(s);
  sc.normalization = k;
  for (int m = 1; m <= truncation; ++m) sc.values.push_back(k * std::pow(m, -s));
  for (int m = truncation; m >= 1; --m) sc.materialized_mass += sc.values[m - 1];
  sc.tail_mass = k * zeta_tail(s, truncation);
  total_variance_check(sc, tail_tolerance);
  return sc;
}

CoefficientScheme make_heat_kernel(double T, const SpectrumModel& spectrum, int truncation,
                                   double tail_tolerance) {
  require(T > 0.0, "heat-kernel coefficients require T > 0");
  require(truncation >= 1, "truncation M must be >= 1");
  require(truncation <= spectrum.level_count(), "truncation exceeds available spectrum levels");
  CoefficientScheme sc;
  sc.rule = CoefficientRule::HeatKernel;
  sc.parameter = T;
  sc.indexing = Indexing::PerEigenfunction;
  sc.truncation = truncation;
  for (int m = 1; m <= truncation; ++m) {
    const double lambda = spectrum.level(m).eigenvalue;
    sc.values.push_back(std::exp(-lambda * T / 2.0) / lambda);
  }
  fill_masses(sc, spectrum);
  sc.tail_mass = spectrum.isotropic()
                     ? per_eigenfunction_tail(CoefficientRule::HeatKernel, T, spectrum, truncation)
                     : 0.0;
  total_variance_check(sc, tail_tolerance);
  return sc;
}

CoefficientScheme make_explicit(std::vector<double> values, Indexing indexing,
                                const SpectrumModel& spectrum,
                                std::vector<double> negative_values) {
  require(!values.empty(), "explicit scheme needs at least one coefficient");
  require(static_cast<int>(values.size()) <= spectrum.level_count(),
          "explicit scheme longer than the spectrum");
  require(negative_values.size() <= spectrum.negative_levels.size(),
          "more negative-level scales than negative levels");
  for (double v : values) require(v >= 0.0 && std::isfinite(v), "coefficients must be >= 0");
  for (double v : negative_values) require(v >= 0.0 && std::isfinite(v), "scales must be >= 0");
  if (indexing == Indexing::PerEigenspace)
    require(spectrum.isotropic(), "per-eigenspace weights are only defined on isotropic geometries");
  CoefficientScheme sc;
  sc.rule = CoefficientRule::Explicit;
  sc.indexing = indexing;
  sc.values = std::move(values);
  sc.negative_values = std::move(negative_values);
  sc.truncation = static_cast<int>(sc.values.size());
  fill_masses(sc, spectrum);
  return sc;
}

double level_h_variance(const CoefficientScheme& scheme, const SpectrumModel& spectrum, int m) {
  if (m < 1 || m > scheme.truncation) return 0.0;
  const auto& lvl = spectrum.level(m);
  const double c = scheme.values[static_cast<std::size_t>(m - 1)];
  if (scheme.indexing == Indexing::PerEigenspace) return c;
  return lvl.multiplicity * c * c * lvl.eigenvalue * lvl.eigenvalue / spectrum.volume;
}

double mode_amplitude(const CoefficientScheme& scheme, const SpectrumModel& spectrum, int m) {
  if (m < 1 || m > scheme.truncation) return 0.0;
  const auto& lvl = spectrum.level(m);
  const double c = scheme.values[static_cast<std::size_t>(m - 1)];
  if (scheme.indexing == Indexing::PerEigenfunction) return c;
  return std::sqrt(spectrum.volume * c / lvl.multiplicity) / lvl.eigenvalue;
}

std::optional<bool> classify_regularity(const CoefficientScheme& scheme,
                                        const SpectrumModel& spectrum, int k, FieldOrder field) {
  require(k >= 0, "classify_regularity: k must be >= 0");
  const double n = spectrum.dimension;
  const double extra = field == FieldOrder::H ? 1.0 : 0.0;
  switch (scheme.rule) {
    case CoefficientRule::HeatKernel:
      return true;
    case CoefficientRule::SphereNormalizedPowerLaw:
      // f ∈ H_r iff r < s/2 + 3/2, and H_r ⊂ C^k for r > k + 1 on a surface;
      // h = Δf loses two derivatives.
      return field == FieldOrder::F ? scheme.parameter > 2.0 * k - 1.0
                                    : scheme.parameter > 2.0 * k + 3.0;
    case CoefficientRule::PowerLaw:
      if (spectrum.op == SpectralOperator::Gjms)
        return scheme.parameter > 1.0 + extra + k / n;
      return scheme.parameter > (n + k) / 2.0 + extra;
    case CoefficientRule::Explicit:
      if (!scheme.asymptotic_tag) return std::nullopt;
      if (scheme.indexing == Indexing::PerEigenspace)
        return field == FieldOrder::F ? scheme.declared_exponent > 2.0 * k - 1.0
                                      : scheme.declared_exponent > 2.0 * k + 3.0;
      if (spectrum.op == SpectralOperator::Gjms)
        return scheme.declared_exponent > 1.0 + extra + k / n;
      return scheme.declared_exponent > (n + k) / 2.0 + extra;
  }
  return std::nullopt;
}

std::string to_string(CoefficientRule rule) {
  switch (rule) {
    case CoefficientRule::PowerLaw: return "power_law";
    case CoefficientRule::HeatKernel: return "heat_kernel";
    case CoefficientRule::SphereNormalizedPowerLaw: return "sphere_normalized";
    case CoefficientRule::Explicit: return "explicit";
  }
  return "unknown";
}

std::string to_string(Geometry geometry) {
  switch (geometry) {
    case Geometry::Sphere2: return "sphere2";
    case Geometry::FlatTorus2: return "flat_torus2";
    case Geometry::RoundSphere4Paneitz: return "round_sphere4_paneitz";
    case Geometry::UserSupplied: return "user";
  }
  return "unknown";
}

}  // namespace randcurv
