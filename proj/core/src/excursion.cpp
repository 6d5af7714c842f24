#include "randcurv/excursion.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "randcurv/parallel.hpp"
#include "randcurv/special.hpp"

namespace randcurv {

namespace {

constexpr double kPi = std::numbers::pi;

// Runs fn(draw_offset, f, h) for every draw, evaluating in fixed blocks.
template <class Fn>
void for_each_draw(const SpectralSampler& sampler, const McOptions& options, Fn&& fn) {
  const std::size_t P = sampler.point_count();
  const bool need_f = sampler.request().f, need_h = sampler.request().h;
  run_blocks(options.samples, kDrawBlock, options.workers, [&](std::size_t begin, std::size_t end) {
    const std::size_t count = end - begin;
    std::vector<double> f(need_f ? P * count : 0), h(need_h ? P * count : 0);
    sampler.sample_block(options.seed, options.first_draw + begin, count,
                         need_f ? f.data() : nullptr, need_h ? h.data() : nullptr, nullptr);
    for (std::size_t j = 0; j < count; ++j)
      fn(begin + j, need_f ? f.data() + j * P : nullptr, need_h ? h.data() + j * P : nullptr);
  });
}

void require_unit_variance(const CoefficientScheme& scheme) {
  const double total = scheme.materialized_mass + scheme.tail_mass;
  if (std::abs(total - 1.0) > 1e-6) {
    std::ostringstream msg;
    msg << "scheme variance is " << total << ", the Euler-characteristic formula assumes 1";
    throw std::invalid_argument(msg.str());
  }
}

SpectrumModel sphere_for(const CoefficientScheme& scheme) {
  return SpectrumModel::sphere2(std::max(1, scheme.truncation));
}

}  // namespace

ExcursionReport make_report(std::size_t events, std::size_t samples) {
  ExcursionReport r;
  r.events = events;
  r.n_samples = samples;
  if (samples > 0) {
    r.estimate = static_cast<double>(events) / static_cast<double>(samples);
    r.standard_error = std::sqrt(r.estimate * (1.0 - r.estimate) / static_cast<double>(samples));
  }
  return r;
}

std::vector<double> sample_suprema(const RandomFieldSpec& spec, const PointSet& grid,
                                   const McOptions& options) {
  spec.validate(grid);
  SampleRequest what;
  what.f = spec.which == FieldKind::F || spec.which == FieldKind::W;
  what.h = spec.which != FieldKind::F;
  const SpectralSampler sampler(spec.spectrum, spec.scheme, grid, what);
  const std::size_t P = grid.size();
  std::vector<double> scale(P, 1.0), kappa(P, 0.0);
  for (std::size_t i = 0; i < P; ++i) {
    if (spec.which == FieldKind::V) scale[i] = 1.0 / spec.reference->at(i);
    if (spec.which == FieldKind::W) kappa[i] = spec.w_factor(i);
  }
  std::vector<double> sup(options.samples);
  for_each_draw(sampler, options, [&](std::size_t d, const double* f, const double* h) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < P; ++i) {
      double v;
      switch (spec.which) {
        case FieldKind::F: v = f[i]; break;
        case FieldKind::H: v = h[i]; break;
        case FieldKind::V: v = h[i] * scale[i]; break;
        default: v = h[i] + kappa[i] * f[i]; break;
      }
      best = std::max(best, v);
    }
    sup[d] = best;
  });
  return sup;
}

std::vector<ExcursionReport> estimate_p2(const RandomFieldSpec& spec,
                                         const std::vector<double>& amplitudes,
                                         const PointSet& grid, const McOptions& options,
                                         const PointSet* refined, std::vector<double>* suprema) {
  if (amplitudes.empty()) throw std::invalid_argument("estimate_p2: empty amplitude list");
  for (double a : amplitudes)
    if (!(a > 0.0)) throw std::invalid_argument("estimate_p2: amplitudes must be positive");
  if (spec.which != FieldKind::V) throw std::invalid_argument("estimate_p2: needs the v = h/R0 field");
  spec.validate(grid);
  if (!spec.reference->constant_sign(grid.size()))
    throw std::invalid_argument("estimate_p2: reference curvature must have constant sign");

  auto count = [&](const std::vector<double>& sup, double a) {
    std::size_t events = 0;
    for (double s : sup) events += s > 1.0 / a;
    return events;
  };
  const std::vector<double> sup = sample_suprema(spec, grid, options);
  std::vector<double> sup_refined;
  if (refined) sup_refined = sample_suprema(spec, *refined, options);

  std::vector<ExcursionReport> out;
  for (double a : amplitudes) {
    ExcursionReport r = make_report(count(sup, a), sup.size());
    r.amplitude = a;
    r.threshold = 1.0 / a;
    r.grid_size = grid.size();
    r.seed = options.seed;
    r.first_draw = options.first_draw;
    if (refined)
      r.refinement_delta = make_report(count(sup_refined, a), sup_refined.size()).estimate - r.estimate;
    out.push_back(std::move(r));
  }
  if (suprema) *suprema = sup;
  return out;
}

bool sign_change_event(const FieldSample& sample, const ReferenceCurvature& reference, double a) {
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sample.h.size(); ++i)
    lowest = std::min(lowest, 1.0 - a * sample.h[i] / reference.at(i));
  return lowest < 0.0;
}

std::vector<ExcursionReport> estimate_linf(const RandomFieldSpec& spec,
                                           const std::vector<LinfPoint>& points,
                                           const PointSet& grid, const McOptions& options,
                                           DeviationMode mode, const PointSet* refined) {
  if (points.empty()) throw std::invalid_argument("estimate_linf: empty (a, u) list");
  for (const auto& p : points)
    if (!(p.a > 0.0) || !(p.u > 0.0)) throw std::invalid_argument("estimate_linf: a and u must be positive");
  const int n = spec.spectrum.dimension;
  if (mode == DeviationMode::Scalar2D && n != 2)
    throw std::invalid_argument("estimate_linf: scalar deviation needs a surface");
  if (mode == DeviationMode::Q && (spec.spectrum.op != SpectralOperator::Gjms || n % 2 != 0))
    throw std::invalid_argument("estimate_linf: Q deviation needs a GJMS spectrum in even dimension");
  const double scale = mode == DeviationMode::Q ? n : 1.0;
  const ReferenceCurvature ref = spec.reference.value_or(ReferenceCurvature::uniform(0.0));

  std::vector<double> amps;
  for (const auto& p : points) amps.push_back(p.a);
  std::sort(amps.begin(), amps.end());
  amps.erase(std::unique(amps.begin(), amps.end()), amps.end());
  const std::size_t A = amps.size();

  auto max_dev = [&](const PointSet& g) {
    RandomFieldSpec s = spec;
    s.which = FieldKind::H;
    s.validate(g);
    const SpectralSampler sampler(spec.spectrum, spec.scheme, g, SampleRequest{true, true, false});
    const std::size_t P = g.size();
    std::vector<double> r0(P);
    for (std::size_t i = 0; i < P; ++i) r0[i] = ref.is_gridded() ? ref.at(i) : ref.constant;
    std::vector<double> out(options.samples * A);
    for_each_draw(sampler, options, [&](std::size_t d, const double* f, const double* h) {
      for (std::size_t k = 0; k < A; ++k) {
        const double a = amps[k];
        double best = 0.0;
        for (std::size_t i = 0; i < P; ++i) {
          const double e = std::exp(-scale * a * f[i]);
          best = std::max(best, std::abs(r0[i] * (e - 1.0) - a * e * h[i]));
        }
        out[d * A + k] = best;
      }
    });
    return out;
  };
  const std::vector<double> dev = max_dev(grid);
  std::vector<double> dev_refined;
  if (refined) dev_refined = max_dev(*refined);

  std::vector<ExcursionReport> out;
  for (const auto& p : points) {
    const std::size_t k =
        static_cast<std::size_t>(std::lower_bound(amps.begin(), amps.end(), p.a) - amps.begin());
    auto events = [&](const std::vector<double>& v) {
      std::size_t e = 0;
      for (std::size_t d = 0; d < options.samples; ++d) e += v[d * A + k] > p.u;
      return e;
    };
    ExcursionReport r = make_report(events(dev), options.samples);
    r.amplitude = p.a;
    r.threshold = p.u;
    r.grid_size = grid.size();
    r.seed = options.seed;
    r.first_draw = options.first_draw;
    if (p.u / p.a < 3.0) r.warnings.push_back("regime: u/a < 3, the log-asymptotic is not meaningful");
    if (p.u >= 0.5) r.warnings.push_back("regime: u >= 0.5, the log-asymptotic assumes small u");
    if (refined) r.refinement_delta = make_report(events(dev_refined), options.samples).estimate - r.estimate;
    out.push_back(std::move(r));
  }
  return out;
}

EulerCounter::EulerCounter(const Triangulation& mesh)
    : vertices_(mesh.vertices.size()), edges_(mesh.edges), faces_(mesh.faces) {
  validate_closed_surface(mesh);
}

int EulerCounter::count(const std::vector<double>& values, double u,
                        std::vector<std::string>* notes) const {
  if (values.size() != vertices_) throw std::invalid_argument("EulerCounter: one value per vertex required");
  for (int attempt = 0; attempt < 8; ++attempt) {
    if (std::find(values.begin(), values.end(), u) == values.end()) break;
    if (notes) {
      std::ostringstream note;
      note.precision(17);
      note << "threshold " << u << " equals a vertex value; moved up by 1e-12";
      notes->push_back(note.str());
    }
    u += 1e-12;
  }
  long chi = 0;
  for (double v : values) chi += v >= u;
  for (const auto& e : edges_) chi -= values[e[0]] >= u && values[e[1]] >= u;
  for (const auto& f : faces_) chi += values[f[0]] >= u && values[f[1]] >= u && values[f[2]] >= u;
  return static_cast<int>(chi);
}

int empirical_euler(const Triangulation& mesh, const std::vector<double>& values, double u) {
  return EulerCounter(mesh).count(values, u);
}

double at_metric_constant(const CoefficientScheme& scheme, const SpectrumModel& spectrum) {
  if (spectrum.geometry != Geometry::Sphere2)
    throw std::invalid_argument("at_metric_constant: S² schemes only");
  double c = 0.0;
  for (int m = 1; m <= scheme.truncation; ++m)
    c += level_h_variance(scheme, spectrum, m) * spectrum.level(m).eigenvalue / 2.0;
  return c;
}

double at_metric_constant(const CoefficientScheme& scheme) {
  return at_metric_constant(scheme, sphere_for(scheme));
}

LipschitzKilling lipschitz_killing(const CoefficientScheme& scheme, const SpectrumModel& spectrum) {
  LipschitzKilling lk;
  lk.L2 = 4.0 * kPi * at_metric_constant(scheme, spectrum);
  return lk;
}

double predicted_euler(const CoefficientScheme& scheme, const SpectrumModel& spectrum, double u) {
  require_unit_variance(scheme);
  const LipschitzKilling lk = lipschitz_killing(scheme, spectrum);
  return lk.L0 * gaussian_tail(u) + lk.L2 * std::pow(2.0 * kPi, -1.5) * u * std::exp(-0.5 * u * u);
}

double predicted_euler(const CoefficientScheme& scheme, double u) {
  return predicted_euler(scheme, sphere_for(scheme), u);
}

EulerCurve euler_curve(const RandomFieldSpec& spec, const Triangulation& mesh,
                       const std::vector<double>& thresholds, const McOptions& options) {
  if (thresholds.empty()) throw std::invalid_argument("euler_curve: empty threshold list");
  if (spec.spectrum.geometry != Geometry::Sphere2)
    throw std::invalid_argument("euler_curve: S² only");
  const EulerCounter counter(mesh);
  const PointSet grid = mesh.as_point_set();
  const SpectralSampler sampler(spec.spectrum, spec.scheme, grid, SampleRequest{false, true, false});
  const std::size_t U = thresholds.size();
  std::vector<int> chi(options.samples * U);
  std::vector<std::vector<std::string>> notes(options.samples);
  const std::size_t P = grid.size();
  for_each_draw(sampler, options, [&](std::size_t d, const double*, const double* h) {
    const std::vector<double> values(h, h + P);
    for (std::size_t k = 0; k < U; ++k) chi[d * U + k] = counter.count(values, thresholds[k], &notes[d]);
  });

  EulerCurve curve;
  curve.thresholds = thresholds;
  curve.n_samples = options.samples;
  curve.lk = lipschitz_killing(spec.scheme, spec.spectrum);
  for (std::size_t k = 0; k < U; ++k) {
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t d = 0; d < options.samples; ++d) {
      const double x = chi[d * U + k];
      sum += x;
      sumsq += x * x;
    }
    const double N = static_cast<double>(options.samples);
    const double mean = sum / N;
    const double var = N > 1 ? std::max(0.0, (sumsq - N * mean * mean) / (N - 1.0)) : 0.0;
    curve.mean.push_back(mean);
    curve.standard_error.push_back(std::sqrt(var / N));
    curve.predicted.push_back(predicted_euler(spec.scheme, spec.spectrum, thresholds[k]));
  }
  for (std::size_t d = 0; d < options.samples; ++d)
    for (auto& note : notes[d]) curve.notes.push_back("draw " + std::to_string(options.first_draw + d) + ": " + note);
  return curve;
}

SphereP2Prediction sphere_p2_prediction(const CoefficientScheme& scheme, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("sphere_p2_prediction: a must be positive");
  if (scheme.indexing != Indexing::PerEigenspace)
    throw std::invalid_argument("sphere_p2_prediction: needs per-eigenspace S² weights");
  SphereP2Prediction p;
  const double total = scheme.materialized_mass + scheme.tail_mass;
  if (std::abs(total - 1.0) > 1e-6)
    p.warnings.push_back("hypothesis: scheme variance " + std::to_string(total) + " is not 1");
  double exponent = 0.0;
  bool known = true;
  switch (scheme.rule) {
    case CoefficientRule::SphereNormalizedPowerLaw:
    case CoefficientRule::PowerLaw:
      exponent = scheme.parameter;
      break;
    case CoefficientRule::HeatKernel:
      exponent = std::numeric_limits<double>::infinity();
      break;
    case CoefficientRule::Explicit:
      known = scheme.asymptotic_tag;
      exponent = scheme.declared_exponent;
      break;
  }
  if (!known) p.warnings.push_back("hypothesis: decay exponent unknown (untagged explicit scheme)");
  else if (!(exponent > 7.0)) p.warnings.push_back("hypothesis: decay exponent s <= 7");
  if (!degeneracy_check(scheme)) p.warnings.push_back("hypothesis: no odd level has a positive coefficient");

  double sum = 0.0;
  for (int m = 1; m <= scheme.truncation; ++m)
    sum += scheme.values[static_cast<std::size_t>(m - 1)] * m * (m + 1.0);
  p.C2 = sum / std::sqrt(2.0 * kPi);
  p.value = p.C1 * gaussian_tail(1.0 / a) + p.C2 / a * std::exp(-1.0 / (2.0 * a * a));
  return p;
}

Matrix3 omega_block(double E) {
  const double k = E / 8.0;
  return {{{k * (3 * E - 2), k * (E + 2), 0.0}, {k * (E + 2), k * (3 * E - 2), 0.0}, {0.0, 0.0, k * (E - 2)}}};
}

Matrix5 level_covariance_block(double E) {
  Matrix5 c{};
  c[0][0] = c[1][1] = E / 2.0;
  const Matrix3 om = omega_block(E);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) c[2 + i][2 + j] = om[i][j];
  return c;
}

Attainability attainability_of(const Matrix5& m) {
  Attainability out;
  out.matrix = m;
  Eigen::Matrix<double, 5, 5> e;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) e(i, j) = m[i][j];
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 5, 5>> eig(e, Eigen::EigenvaluesOnly);
  out.min_eigenvalue = eig.eigenvalues().minCoeff();
  out.trace = e.trace();
  out.positive_definite = out.min_eigenvalue > 1e-12 * std::abs(out.trace);
  return out;
}

Attainability attainability_matrix(const CoefficientScheme& scheme, int truncation) {
  if (truncation < 1 || truncation > scheme.truncation)
    throw std::invalid_argument("attainability_matrix: truncation out of range");
  const SpectrumModel sphere = sphere_for(scheme);
  Matrix5 total{};
  for (int m = 1; m <= truncation; ++m) {
    const double w = level_h_variance(scheme, sphere, m);
    const Matrix5 c = level_covariance_block(m * (m + 1.0));
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) total[i][j] += w * c[i][j];
  }
  return attainability_of(total);
}

bool degeneracy_check(const CoefficientScheme& scheme) {
  for (int m = 1; m <= scheme.truncation; m += 2)
    if (scheme.values[static_cast<std::size_t>(m - 1)] > 0.0) return true;
  return false;
}

}  // namespace randcurv
