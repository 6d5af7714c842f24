#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>

#include "randcurv/bounds.hpp"
#include "randcurv/curvature.hpp"
#include "randcurv/excursion.hpp"
#include "randcurv/sampler.hpp"
#include "randcurv/special.hpp"

#ifndef RANDCURV_VERSION
#define RANDCURV_VERSION "unknown"
#endif

namespace randcurv::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPi = std::numbers::pi;

std::string num(double x) { return format_number(x); }

std::string joined(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += "; ";
    out += s;
  }
  std::replace(out.begin(), out.end(), ',', ' ');
  return out;
}

Table start_table(const ExperimentConfig& c, const std::string& name) {
  Table t;
  t.name = name;
  t.add_meta("randcurv", std::string(RANDCURV_VERSION));
  t.add_meta("command", c.command);
  t.add_meta("config_hash", c.hash());
  t.add_meta("seed", std::to_string(c.seed));
  return t;
}

void describe(Table& t, const RunSetup& s) {
  const auto& sc = s.spec.scheme;
  t.add_meta("geometry", to_string(s.spec.spectrum.geometry));
  t.add_meta("scheme", to_string(sc.rule));
  t.add_meta("truncation", std::to_string(sc.truncation));
  t.add_meta("materialized_variance", sc.materialized_mass);
  t.add_meta("tail_variance", sc.tail_mass);
  t.add_meta("K", sc.normalization.value_or(kNaN));
  t.add_meta("grid_points", static_cast<double>(s.grid.size()));
}

McOptions mc(const ExperimentConfig& c, const RunSetup& s, unsigned workers) {
  McOptions o;
  o.samples = s.samples;
  o.seed = c.seed;
  o.first_draw = s.first_draw;
  o.workers = workers;
  return o;
}

template <class Fn>
auto library_call(Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

bool sphere_eigenspace(const RunSetup& s) {
  return s.spec.spectrum.geometry == Geometry::Sphere2 && s.spec.scheme.indexing == Indexing::PerEigenspace;
}

void cmd_sample(const ExperimentConfig& c, RunRecord& rec) {
  RunSetup s = make_setup(c, FieldKind::H);
  if (s.spec.spectrum.geometry == Geometry::RoundSphere4Paneitz)
    throw ConfigError("sample: fields on sphere4 are not sampled");
  if (!s.spec.reference) throw ConfigError("sample: no reference curvature (set run.reference)");
  const long draws = c.integer("sample", "draws", 1);
  if (draws < 1) throw ConfigError("sample.draws must be >= 1");
  const double a = c.number("sample", "a", 0.1);
  if (!(a >= 0.0)) throw ConfigError("sample.a must be >= 0");
  const int n = s.spec.spectrum.dimension;
  const bool q = s.spec.curvature == CurvatureKind::Q;
  const bool gradient = !q && n > 2;
  if (gradient && s.spec.spectrum.geometry == Geometry::UserSupplied)
    throw ConfigError("sample: scalar curvature for n > 2 needs gradients, unavailable for user spectra");

  const SpectralSampler sampler =
      library_call([&] { return SpectralSampler(s.spec.spectrum, s.spec.scheme, s.grid, {true, true, gradient}); });
  RandomFieldSpec fspec = s.spec;
  fspec.which = FieldKind::F;
  const double sigma2_f = variance_summary(fspec, s.grid).sigma2_sup;
  const double sigma2_h = variance_summary(s.spec, s.grid).sigma2_sup;
  const bool sphere = sphere_eigenspace(s) || s.spec.spectrum.geometry == Geometry::Sphere2;
  const double C = sphere ? at_metric_constant(s.spec.scheme, s.spec.spectrum) : kNaN;

  for (long d = 0; d < draws; ++d) {
    const std::uint64_t draw = s.first_draw + static_cast<std::uint64_t>(d);
    char stem[32];
    std::snprintf(stem, sizeof stem, "sample_%06llu", static_cast<unsigned long long>(draw));
    Table t = start_table(c, stem);
    describe(t, s);
    t.add_meta("draw", std::to_string(draw));
    t.add_meta("a", a);
    t.add_meta("C", C);
    t.add_meta("L2", sphere ? 4 * kPi * C : kNaN);
    t.add_meta("sigma2_f", sigma2_f);
    t.add_meta("sigma2_h", sigma2_h);
    t.columns = {"index", "x", "y", "z", "weight", "f", "h", q ? "Q1" : "R1"};
    const FieldSample fs = sampler.sample(c.seed, draw);
    const CurvatureField cf = q ? q_curvature(*s.spec.reference, fs, a, n)
                              : n == 2 ? scalar_curvature_2d(*s.spec.reference, fs, a)
                                       : scalar_curvature_nd(*s.spec.reference, fs, a, n);
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
      const auto& p = s.grid.points[i];
      t.add_row({std::to_string(i), num(p[0]), num(p[1]), num(p[2]), num(s.grid.weights[i]), num(fs.f[i]),
                 num(fs.h[i]), num(cf.values[i])});
    }
    rec.tables.push_back(std::move(t));
  }
}

void cmd_p2(const ExperimentConfig& c, RunRecord& rec, unsigned workers) {
  RunSetup s = make_setup(c, FieldKind::V);
  const std::vector<double> amps = c.numbers("p2", "amplitudes");
  if (amps.empty()) throw ConfigError("p2.amplitudes: empty amplitude grid");
  const std::optional<PointSet> fine = c.flag("p2", "refine", true) ? refined_grid(c, s) : std::nullopt;
  std::vector<double> sup;
  const auto reports = library_call(
      [&] { return estimate_p2(s.spec, amps, s.grid, mc(c, s, workers), fine ? &*fine : nullptr, &sup); });
  const double sigma_v = std::sqrt(variance_summary(s.spec, s.grid).sigma2_sup);
  const double e_sup = std::accumulate(sup.begin(), sup.end(), 0.0) / static_cast<double>(sup.size());
  const double alpha = concentration_alpha(e_sup, sigma_v);
  const double C1 = mills_lower_constant(sigma_v, *std::max_element(amps.begin(), amps.end()));

  Table t = start_table(c, "p2");
  describe(t, s);
  t.add_meta("samples", static_cast<double>(s.samples));
  t.add_meta("sigma2_v", sigma_v * sigma_v);
  t.add_meta("E_sup_v", e_sup);
  t.add_meta("alpha", alpha);
  t.add_meta("C1_low", C1);
  t.add_meta("C2_up", alpha);
  t.add_meta("refined_points", fine ? static_cast<double>(fine->size()) : kNaN);
  t.columns = {"a", "u", "estimate", "standard_error", "events", "n", "prediction", "ratio", "point_lower",
               "lower", "upper", "borell_tis", "refinement_delta", "warnings"};
  for (const auto& r : reports) {
    double prediction = kNaN;
    std::vector<std::string> warn = r.warnings;
    if (sphere_eigenspace(s)) {
      const auto p = sphere_p2_prediction(s.spec.scheme, r.amplitude);
      prediction = p.value;
      warn.insert(warn.end(), p.warnings.begin(), p.warnings.end());
    }
    const TwoSidedBound b = p2_two_sided(r.amplitude, sigma_v, C1, alpha);
    const double u = r.threshold;
    t.add_row({num(r.amplitude), num(u), num(r.estimate), num(r.standard_error), std::to_string(r.events),
               std::to_string(r.n_samples), num(prediction), num(r.estimate / prediction),
               num(gaussian_tail(u / sigma_v)), num(b.lower), num(b.upper),
               num(u > e_sup ? borell_tis_concentration(u, e_sup, sigma_v) : kNaN),
               num(r.refinement_delta.value_or(kNaN)), joined(warn)});
    for (const auto& w : warn) rec.warnings.push_back("a=" + num(r.amplitude) + ": " + w);
  }
  rec.tables.push_back(std::move(t));
}

void cmd_euler(const ExperimentConfig& c, RunRecord& rec, unsigned workers) {
  RunSetup s = make_setup(c, FieldKind::H);
  if (s.spec.spectrum.geometry != Geometry::Sphere2) throw ConfigError("euler: needs run.geometry = sphere2");
  std::vector<double> u = c.numbers("euler", "thresholds");
  if (u.empty()) {
    const double lo = c.number("euler", "u_min", 1.0), hi = c.number("euler", "u_max", 3.5);
    const long count = c.integer("euler", "u_count", 20);
    if (count < 1 || !(hi >= lo)) throw ConfigError("euler: need u_count >= 1 and u_max >= u_min");
    for (long i = 0; i < count; ++i) u.push_back(count == 1 ? lo : lo + (hi - lo) * double(i) / double(count - 1));
  }
  const long depth = c.integer("run", "depth", 5);
  if (depth < 0 || depth > 8) throw ConfigError("run.depth must lie in [0, 8]");
  const Triangulation mesh = icosphere(static_cast<int>(depth));
  const EulerCurve curve = library_call([&] { return euler_curve(s.spec, mesh, u, mc(c, s, workers)); });

  Table t = start_table(c, "euler");
  describe(t, s);
  t.add_meta("depth", static_cast<double>(depth));
  t.add_meta("mesh_vertices", static_cast<double>(mesh.vertices.size()));
  t.add_meta("samples", static_cast<double>(curve.n_samples));
  t.add_meta("C", at_metric_constant(s.spec.scheme, s.spec.spectrum));
  t.add_meta("L0", curve.lk.L0);
  t.add_meta("L1", curve.lk.L1);
  t.add_meta("L2", curve.lk.L2);
  t.add_meta("threshold_notes", static_cast<double>(curve.notes.size()));
  t.columns = {"u", "mean_chi", "standard_error", "predicted", "z"};
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double se = curve.standard_error[i];
    const double z = se > 0 ? (curve.mean[i] - curve.predicted[i]) / se : kNaN;
    t.add_row({num(u[i]), num(curve.mean[i]), num(se), num(curve.predicted[i]), num(z)});
  }
  rec.warnings.insert(rec.warnings.end(), curve.notes.begin(), curve.notes.end());
  rec.tables.push_back(std::move(t));
}

void cmd_linf(const ExperimentConfig& c, RunRecord& rec, unsigned workers) {
  RunSetup s = make_setup(c, FieldKind::W);
  const std::vector<double> us = c.numbers("linf", "u"), ratios = c.numbers("linf", "ratio");
  if (us.empty() || ratios.empty()) throw ConfigError("linf: need u and ratio lists");
  std::vector<LinfPoint> pts;
  for (double u : us)
    for (double r : ratios) {
      if (!(u > 0.0 && r > 0.0)) throw ConfigError("linf: u and ratio must be positive");
      pts.push_back({u / r, u});
    }
  const std::string mode = c.text("linf", "mode", s.spec.curvature == CurvatureKind::Q ? "q" : "scalar");
  if (mode != "scalar" && mode != "q") throw ConfigError("linf.mode must be scalar or q");
  const std::optional<PointSet> fine = c.flag("linf", "refine", false) ? refined_grid(c, s) : std::nullopt;
  const auto reports = library_call([&] {
    return estimate_linf(s.spec, pts, s.grid, mc(c, s, workers),
                         mode == "q" ? DeviationMode::Q : DeviationMode::Scalar2D, fine ? &*fine : nullptr);
  });
  const double sigma_w = std::sqrt(variance_summary(s.spec, s.grid).sigma2_sup);

  Table t = start_table(c, "linf");
  describe(t, s);
  t.add_meta("samples", static_cast<double>(s.samples));
  t.add_meta("sigma2_w", sigma_w * sigma_w);
  t.columns = {"u", "a", "ratio", "estimate", "standard_error", "events", "n", "log_estimate", "asymptote",
               "log_ratio", "regime_ok", "refinement_delta", "flags"};
  for (const auto& r : reports) {
    const LinfAsymptote as = linf_log_asymptote(r.threshold, r.amplitude, sigma_w);
    const double le = r.events > 0 ? std::log(r.estimate) : kNaN;
    std::vector<std::string> flags = as.flags;
    flags.insert(flags.end(), r.warnings.begin(), r.warnings.end());
    t.add_row({num(r.threshold), num(r.amplitude), num(r.threshold / r.amplitude), num(r.estimate),
               num(r.standard_error), std::to_string(r.events), std::to_string(r.n_samples), num(le),
               num(as.value), num(le / as.value), as.regime_ok ? "true" : "false",
               num(r.refinement_delta.value_or(kNaN)), joined(flags)});
  }
  rec.tables.push_back(std::move(t));
}

void cmd_heat(const ExperimentConfig& c, RunRecord& rec) {
  RunSetup s = make_setup(c, FieldKind::H);
  if (!s.spec.reference) throw ConfigError("heat: no reference curvature (set run.reference)");
  const auto& R0 = *s.spec.reference;
  const std::size_t P = s.grid.empty() ? 1 : s.grid.size();
  if (!R0.nowhere_zero(P)) throw ConfigError("heat: reference curvature must be nowhere zero");
  double inf_r0sq = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < P; ++i) inf_r0sq = std::min(inf_r0sq, R0.at(i) * R0.at(i));
  std::vector<double> Ts = c.numbers("heat", "T");
  if (Ts.empty()) Ts = {0.01, 0.1, 1.0, 5.0, 10.0};
  const bool laplacian = s.spec.spectrum.op == SpectralOperator::Laplacian;

  Table t = start_table(c, "heat");
  t.add_meta("geometry", to_string(s.spec.spectrum.geometry));
  t.add_meta("dimension", static_cast<double>(s.spec.spectrum.dimension));
  t.add_meta("inf_R0sq", inf_r0sq);
  t.columns = {"T", "heat_sup", "sigma2_v", "small_T", "small_ratio", "large_T", "large_ratio", "lambda1",
               "multiplicity", "levels_used"};
  for (double T : Ts) {
    if (!(T > 0.0)) throw ConfigError("heat.T values must be positive");
    const HeatVariance hv = library_call([&] { return heat_variance(s.spec.spectrum, T); });
    const double sv = heat_sigma_v(s.spec.spectrum, R0, T);
    const double small = laplacian ? heat_sigma_small_T(T, s.spec.spectrum.dimension, inf_r0sq) : kNaN;
    const LargeTAsymptote large = heat_sigma_large_T(s.spec.spectrum, R0, T);
    t.add_row({num(T), num(hv.sup), num(sv), num(small), num(sv / small), num(large.asymptote),
               num(sv / large.asymptote), num(large.lambda1), std::to_string(large.multiplicity),
               std::to_string(hv.levels_used)});
  }
  rec.tables.push_back(std::move(t));
}

std::vector<double> amplitudes_or_default(const ExperimentConfig& c, const std::string& section) {
  std::vector<double> a = c.numbers(section, "amplitudes");
  if (a.empty()) a = {0.1, 0.01, 0.001};
  for (double x : a)
    if (!(x > 0.0)) throw ConfigError(section + ".amplitudes must be positive");
  return a;
}

void limit_rows(Table& t, const std::vector<double>& amps, double sigma_v, double C1, double C2, bool q,
                int n, double alpha) {
  t.columns = {"a", "lower", "upper", "lower_limit", "upper_limit", "limit", "lower_gap", "upper_gap",
               "nd_negative"};
  for (double a : amps) {
    const TwoSidedBound b = q ? q_sign_bounds(a, sigma_v, C1, C2) : p2_two_sided(a, sigma_v, C1, C2);
    const double scale = std::abs(b.limit);
    t.add_row({num(a), num(b.lower), num(b.upper), num(b.lower_limit), num(b.upper_limit), num(b.limit),
               num(std::abs(b.lower_limit - b.limit) / scale), num(std::abs(b.upper_limit - b.limit) / scale),
               num(n > 2 ? nd_negative_bound(a, n, sigma_v, alpha) : kNaN)});
  }
}

void cmd_bounds(const ExperimentConfig& c, RunRecord& rec) {
  const long n = c.integer("bounds", "n", 4);
  const double sigma_v = c.number("bounds", "sigma_v", 1.0), sigma_2 = c.number("bounds", "sigma_2", 1.0);
  const double alpha = c.number("bounds", "alpha", 0.0);
  if (n < 2 || !(sigma_v > 0.0) || !(sigma_2 > 0.0) || !(alpha >= 0.0))
    throw ConfigError("bounds: need n >= 2, sigma_v > 0, sigma_2 > 0, alpha >= 0");
  const std::vector<double> amps = amplitudes_or_default(c, "bounds");
  const double C1 = c.number("bounds", "C1", mills_lower_constant(sigma_v, *std::max_element(amps.begin(), amps.end())));
  const double C2 = c.number("bounds", "C2", 1.0);

  Table t = start_table(c, "bounds");
  t.add_meta("n", static_cast<double>(n));
  t.add_meta("sigma_v", sigma_v);
  t.add_meta("sigma_2", sigma_2);
  t.add_meta("alpha", alpha);
  t.add_meta("C1", C1);
  t.add_meta("C2", C2);
  const auto pair = [&](const std::string& key) {
    const auto v = c.numbers("bounds", key);
    if (!v.empty() && v.size() != 2) throw ConfigError("bounds." + key + " takes two values");
    return v;
  };
  if (const auto r = pair("inf_R0sq"); !r.empty()) t.add_meta("compare_small_T", to_string(compare_small_T(r[0], r[1])));
  if (const auto l = pair("lambda1"); !l.empty()) t.add_meta("compare_large_T", to_string(compare_large_T(l[0], l[1])));
  limit_rows(t, amps, sigma_v, C1, C2, false, static_cast<int>(n), alpha);
  rec.tables.push_back(std::move(t));

  if (n > 2) {
    const NdConstants k = nd_positive_constants(static_cast<int>(n), sigma_v, sigma_2);
    Table kt = start_table(c, "bounds_constants");
    kt.columns = {"n", "sigma_v", "sigma_2", "kappa", "delta0", "one_minus_delta0", "B", "exponent_negative",
                  "exponent_positive", "residual"};
    const double resid = k.delta0 * k.delta0 + k.kappa * k.delta0 - k.kappa;
    kt.add_row({std::to_string(n), num(sigma_v), num(sigma_2), num(k.kappa), num(k.delta0),
                num(k.one_minus_delta0), num(k.B), num(k.exponent_negative), num(k.exponent_positive), num(resid)});
    rec.tables.push_back(std::move(kt));
  }
}

void cmd_qsign(const ExperimentConfig& c, RunRecord& rec, unsigned workers) {
  const std::vector<double> amps = amplitudes_or_default(c, "qsign");
  const double amax = *std::max_element(amps.begin(), amps.end());
  Table t = start_table(c, "qsign");
  double sigma_v = 0.0;
  const std::string geometry = c.text("run", "geometry", "sphere2");
  if (geometry == "sphere4") {
    const double tq = c.number("qsign", "t", 0.1);
    const long level = c.integer("qsign", "level", 1);
    if (!(tq > 0.0) || level < 1) throw ConfigError("qsign: need t > 0 and level >= 1");
    const auto s4 = SpectrumModel::round_sphere4_paneitz(static_cast<int>(level));
    const auto& lvl = s4.level(static_cast<int>(level));
    const double Q0 = round_s4_q_curvature();
    sigma_v = std::sqrt(q_sigma_v_single_level(tq, lvl.eigenvalue, lvl.multiplicity, s4.volume, Q0));
    t.add_meta("geometry", to_string(s4.geometry));
    t.add_meta("Q0", Q0);
    t.add_meta("t", tq);
    t.add_meta("level", static_cast<double>(level));
    t.add_meta("lambda", lvl.eigenvalue);
    t.add_meta("multiplicity", static_cast<double>(lvl.multiplicity));
    t.add_meta("volume", s4.volume);
  } else {
    RunSetup s = make_setup(c, FieldKind::V);
    if (s.spec.spectrum.op != SpectralOperator::Gjms || s.spec.curvature != CurvatureKind::Q)
      throw ConfigError("qsign: needs run.geometry = sphere4 or a gjms spectrum file");
    sigma_v = std::sqrt(variance_summary(s.spec, s.grid).sigma2_sup);
    describe(t, s);
    const auto reports = library_call([&] { return estimate_p2(s.spec, amps, s.grid, mc(c, s, workers)); });
    Table m = start_table(c, "qsign_mc");
    describe(m, s);
    m.columns = {"a", "u", "estimate", "standard_error", "events", "n"};
    for (const auto& r : reports)
      m.add_row({num(r.amplitude), num(r.threshold), num(r.estimate), num(r.standard_error),
                 std::to_string(r.events), std::to_string(r.n_samples)});
    rec.tables.push_back(std::move(m));
  }
  const double C1 = c.number("qsign", "C1", mills_lower_constant(sigma_v, amax));
  const double C2 = c.number("qsign", "C2", 1.0);
  t.add_meta("sigma2_v", sigma_v * sigma_v);
  t.add_meta("C1", C1);
  t.add_meta("C2", C2);
  limit_rows(t, amps, sigma_v, C1, C2, true, 2, 0.0);
  rec.tables.insert(rec.tables.begin(), std::move(t));
}

}  // namespace

RunRecord execute(const ExperimentConfig& config, unsigned workers) {
  RunRecord rec;
  rec.command = config.command;
  rec.config_hash = config.hash();
  rec.seed = config.seed;
  rec.seed_source = config.seed_source;
  rec.workers = workers;
  rec.version = RANDCURV_VERSION;
  rec.timestamp = utc_timestamp();
  const std::string& cmd = config.command;
  if (cmd == "sample") cmd_sample(config, rec);
  else if (cmd == "p2") cmd_p2(config, rec, workers);
  else if (cmd == "euler") cmd_euler(config, rec, workers);
  else if (cmd == "linf") cmd_linf(config, rec, workers);
  else if (cmd == "heat") cmd_heat(config, rec);
  else if (cmd == "bounds") cmd_bounds(config, rec);
  else if (cmd == "qsign") cmd_qsign(config, rec, workers);
  else throw ConfigError("unknown command '" + cmd + "'");
  return rec;
}

RunRecord run_command(const ExperimentConfig& config, const RunOptions& options) {
  namespace fs = std::filesystem;
  RunRecord rec = execute(config, options.workers);
  const fs::path dir(options.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  auto open = [](const fs::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return out;
  };
  for (const auto& t : rec.tables) {
    const fs::path p = dir / (t.name + ".csv");
    std::ofstream out = open(p);
    write_csv(out, t);
    if (!out) throw std::runtime_error("write failed: " + p.string());
    rec.files.push_back(p.string());
  }
  const fs::path jp = dir / (config.command + ".json");
  rec.files.push_back(jp.string());
  std::ofstream out = open(jp);
  out << run_json(rec).dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + jp.string());
  return rec;
}

}  // namespace randcurv::cli
