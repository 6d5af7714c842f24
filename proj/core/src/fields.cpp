#include "randcurv/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "randcurv/harmonics.hpp"
#include "randcurv/special.hpp"

namespace randcurv {

namespace {

constexpr double kPi = std::numbers::pi;

double dot(const Vec3& x, const Vec3& y) { return x[0] * y[0] + x[1] * y[1] + x[2] * y[2]; }

// Level data shared by every kernel evaluation of one spec.
struct LevelKernel {
  double eigenvalue = 0.0;
  double hvar = 0.0;   // h-variance contributed by the level
  double amp2 = 0.0;   // squared f-amplitude per eigenfunction
  std::vector<std::array<int, 2>> half;  // torus half-plane vectors
};

class KernelEvaluator {
 public:
  explicit KernelEvaluator(const RandomFieldSpec& spec) : spec_(spec) {
    const auto& sp = spec.spectrum;
    for (int m = 1; m <= spec.scheme.truncation; ++m) {
      LevelKernel k;
      k.eigenvalue = sp.level(m).eigenvalue;
      k.hvar = level_h_variance(spec.scheme, sp, m);
      const double g = mode_amplitude(spec.scheme, sp, m);
      k.amp2 = g * g;
      if (sp.geometry == Geometry::FlatTorus2)
        k.half = torus_half_vectors(std::lround(k.eigenvalue));
      levels_.push_back(std::move(k));
    }
  }

  CrossCovariance cross(const PointSet& grid, std::size_t i, std::size_t j) const {
    CrossCovariance out;
    const auto& sp = spec_.spectrum;
    switch (sp.geometry) {
      case Geometry::Sphere2: {
        const double t = std::clamp(dot(grid.points[i], grid.points[j]), -1.0, 1.0);
        // P_m(t) by the same recurrence as legendre(), carried along the level loop.
        double p0 = 1.0, p1 = t;
        for (std::size_t m = 1; m <= levels_.size(); ++m) {
          double pm;
          if (m == 1) {
            pm = p1;
          } else {
            pm = ((2.0 * m - 1.0) * t * p1 - (m - 1.0) * p0) / static_cast<double>(m);
            p0 = p1;
            p1 = pm;
          }
          const auto& k = levels_[m - 1];
          const double e = k.eigenvalue;
          out.hh += k.hvar * pm;
          out.ff += k.hvar / (e * e) * pm;
          out.fh -= k.hvar / e * pm;
        }
        break;
      }
      case Geometry::FlatTorus2: {
        const double dx = grid.points[i][0] - grid.points[j][0];
        const double dy = grid.points[i][1] - grid.points[j][1];
        for (const auto& k : levels_) {
          double s = 0.0;
          for (const auto& v : k.half) s += std::cos(v[0] * dx + v[1] * dy);
          const double base = k.amp2 * s / (2.0 * kPi * kPi);
          out.ff += base;
          out.fh -= base * k.eigenvalue;
          out.hh += base * k.eigenvalue * k.eigenvalue;
        }
        break;
      }
      case Geometry::UserSupplied: {
        const auto& data = *sp.user;
        for (std::size_t m = 0; m < levels_.size(); ++m) {
          const auto& k = levels_[m];
          const double base = k.amp2 * data.positive[m][i] * data.positive[m][j];
          out.ff += base;
          out.fh -= base * k.eigenvalue;
          out.hh += base * k.eigenvalue * k.eigenvalue;
        }
        for (std::size_t n = 0; n < spec_.scheme.negative_values.size(); ++n) {
          const double t = spec_.scheme.negative_values[n];
          const double mu = sp.negative_levels[n].eigenvalue;
          const double base = t * t * data.negative[n][i] * data.negative[n][j];
          out.ff += base;
          out.fh += base * mu;
          out.hh += base * mu * mu;
        }
        break;
      }
      case Geometry::RoundSphere4Paneitz:
        throw std::invalid_argument("pointwise kernels on S⁴ are not available (no S⁴ grids)");
    }
    return out;
  }

  double value(const PointSet& grid, std::size_t i, std::size_t j) const {
    const CrossCovariance c = cross(grid, i, j);
    switch (spec_.which) {
      case FieldKind::F: return c.ff;
      case FieldKind::H: return c.hh;
      case FieldKind::V: return c.hh / (spec_.reference->at(i) * spec_.reference->at(j));
      case FieldKind::W: {
        const double ki = spec_.w_factor(i), kj = spec_.w_factor(j);
        return c.hh + (ki + kj) * c.fh + ki * kj * c.ff;
      }
    }
    return 0.0;
  }

 private:
  const RandomFieldSpec& spec_;
  std::vector<LevelKernel> levels_;
};

double sphere_series(const RandomFieldSpec& spec, double d, int power) {
  if (spec.spectrum.geometry != Geometry::Sphere2)
    throw std::invalid_argument("sphere covariance requested on " + spec.spectrum.name());
  const double t = std::cos(d);
  double sum = 0.0;
  for (int m = 1; m <= spec.scheme.truncation; ++m) {
    const double e = spec.spectrum.level(m).eigenvalue;
    sum += level_h_variance(spec.scheme, spec.spectrum, m) / std::pow(e, power) * legendre(m, t);
  }
  return sum;
}

}  // namespace

bool ReferenceCurvature::nowhere_zero(std::size_t points) const {
  if (gridded.empty()) return constant != 0.0;
  for (std::size_t i = 0; i < points && i < gridded.size(); ++i)
    if (gridded[i] == 0.0) return false;
  return true;
}

bool ReferenceCurvature::constant_sign(std::size_t points) const {
  if (gridded.empty()) return constant != 0.0;
  bool pos = false, neg = false;
  for (std::size_t i = 0; i < points && i < gridded.size(); ++i) {
    pos |= gridded[i] > 0.0;
    neg |= gridded[i] < 0.0;
    if (gridded[i] == 0.0) return false;
  }
  return pos != neg;
}

void RandomFieldSpec::validate(const PointSet& grid) const {
  if (grid.empty()) throw std::invalid_argument("empty evaluation grid");
  if (scheme.truncation < 1) throw std::invalid_argument("truncation M must be >= 1");
  if (scheme.truncation > spectrum.level_count())
    throw std::invalid_argument("scheme truncation exceeds the spectrum");
  const bool grid_ok = (spectrum.geometry == Geometry::Sphere2 && grid.kind == PointSet::Kind::Sphere) ||
                       (spectrum.geometry == Geometry::FlatTorus2 && grid.kind == PointSet::Kind::Torus) ||
                       (spectrum.geometry == Geometry::UserSupplied &&
                        grid.kind == PointSet::Kind::Opaque && spectrum.user &&
                        grid.size() == spectrum.user->point_count);
  if (!grid_ok) throw std::invalid_argument("grid does not belong to geometry " + spectrum.name());
  if (which == FieldKind::V || which == FieldKind::W) {
    if (!reference) throw std::invalid_argument("v and w fields need a reference curvature");
    if (reference->is_gridded() && reference->gridded.size() != grid.size())
      throw std::invalid_argument("gridded reference curvature has the wrong length");
  }
  if (which == FieldKind::V && !reference->nowhere_zero(grid.size()))
    throw std::invalid_argument("v = h/R0 needs R0 nowhere zero");
}

double RandomFieldSpec::w_factor(std::size_t i) const {
  const double r = reference ? reference->at(i) : 0.0;
  return curvature == CurvatureKind::Q ? spectrum.dimension * r : r;
}

CrossCovariance cross_covariance(const RandomFieldSpec& spec, const PointSet& grid, std::size_t i,
                                 std::size_t j) {
  return KernelEvaluator(spec).cross(grid, i, j);
}

double covariance(const RandomFieldSpec& spec, const PointSet& grid, std::size_t i, std::size_t j) {
  return KernelEvaluator(spec).value(grid, i, j);
}

std::vector<double> covariance_matrix(const RandomFieldSpec& spec, const PointSet& grid) {
  spec.validate(grid);
  const KernelEvaluator k(spec);
  const std::size_t n = grid.size();
  std::vector<double> out(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) out[i * n + j] = out[j * n + i] = k.value(grid, i, j);
  return out;
}

double covariance_h_sphere(const RandomFieldSpec& spec, double d) { return sphere_series(spec, d, 0); }

double covariance_f_sphere(const RandomFieldSpec& spec, double d) { return sphere_series(spec, d, 2); }

VarianceSummary variance_summary(const RandomFieldSpec& spec, const PointSet& grid) {
  spec.validate(grid);
  const KernelEvaluator k(spec);
  VarianceSummary out;
  out.sigma2_sup = -std::numeric_limits<double>::infinity();
  out.sigma2_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = k.value(grid, i, i);
    if (v > out.sigma2_sup) {
      out.sigma2_sup = v;
      out.argmax = i;
    }
    out.sigma2_min = std::min(out.sigma2_min, v);
  }
  out.argmax_point = grid.points[out.argmax];
  out.is_constant = out.sigma2_sup - out.sigma2_min <= 1e-10 * std::abs(out.sigma2_sup);
  return out;
}

HeatVariance heat_variance(const SpectrumModel& spectrum, double T) {
  if (!(T > 0.0)) throw std::invalid_argument("heat_variance: T must be positive");
  HeatVariance out;
  double sum = 0.0;
  switch (spectrum.geometry) {
    case Geometry::Sphere2:
    case Geometry::RoundSphere4Paneitz: {
      const bool s2 = spectrum.geometry == Geometry::Sphere2;
      for (int m = 1;; ++m) {
        const SpectralLevel lvl = s2 ? sphere_level(m) : paneitz_level_s4(m);
        const double term = lvl.multiplicity * std::exp(-lvl.eigenvalue * T);
        sum += term;
        out.levels_used = m;
        if (term < 1e-17 * sum && m > 2) break;
        if (m > 10'000'000) throw std::runtime_error("heat_variance: series did not converge");
      }
      out.values = {sum / spectrum.volume};
      break;
    }
    case Geometry::FlatTorus2: {
      const long r = static_cast<long>(std::sqrt(45.0 / T)) + 2;
      // Σ_{k≠0} e^{-|k|²T} factorises as (Σ_k e^{-k²T})² - 1.
      double line = 1.0;
      for (long k = 1; k <= r; ++k) line += 2.0 * std::exp(-static_cast<double>(k * k) * T);
      sum = line * line - 1.0;
      out.levels_used = static_cast<int>(r);
      out.values = {sum / spectrum.volume};
      break;
    }
    case Geometry::UserSupplied: {
      const auto& data = *spectrum.user;
      out.values.assign(data.point_count, 0.0);
      for (std::size_t m = 0; m < spectrum.levels.size(); ++m) {
        const double e = std::exp(-spectrum.levels[m].eigenvalue * T);
        for (std::size_t i = 0; i < data.point_count; ++i)
          out.values[i] += e * data.positive[m][i] * data.positive[m][i];
      }
      out.levels_used = spectrum.level_count();
      break;
    }
  }
  const auto it = std::max_element(out.values.begin(), out.values.end());
  out.sup = *it;
  out.argmax = static_cast<std::size_t>(it - out.values.begin());
  return out;
}

double gradient_variance_sphere(const RandomFieldSpec& spec) {
  if (spec.spectrum.geometry != Geometry::Sphere2)
    throw std::invalid_argument("gradient_variance_sphere: isotropic S² only; use a Monte Carlo estimate");
  double sum = 0.0;
  for (int m = 1; m <= spec.scheme.truncation; ++m)
    sum += level_h_variance(spec.scheme, spec.spectrum, m) / spec.spectrum.level(m).eigenvalue;
  return sum;
}

}  // namespace randcurv
