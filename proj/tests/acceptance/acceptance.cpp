// Acceptance run: one PASS/FAIL line per criterion.
//
// Exit status is nonzero when a criterion outside kKnownRed fails, or when any
// criterion fails under --strict.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "randcurv/bounds.hpp"
#include "randcurv/curvature.hpp"
#include "randcurv/excursion.hpp"
#include "randcurv/harmonics.hpp"
#include "randcurv/parallel.hpp"
#include "randcurv/sampler.hpp"
#include "randcurv/special.hpp"

#ifdef RANDCURV_HAVE_RUNNER
#include "commands.hpp"
#endif

using namespace randcurv;

namespace {

constexpr double kPi = std::numbers::pi;

// Criterion 7 cannot pass at u = 0.1 for any field: see the ledger entry on
// the finite-u bias of the L-infinity asymptotic.
const std::set<int> kKnownRed{7};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

RandomFieldSpec default_sphere(FieldKind which = FieldKind::H) {
  return {SpectrumModel::sphere2(12), make_sphere_normalized(8.0, 12), which, ReferenceCurvature::uniform(1.0)};
}

Vec3 at_distance(const Vec3& x, double d, std::mt19937_64& rng) {
  // Rotate x by d towards a random orthogonal direction.
  std::normal_distribution<double> g;
  Vec3 r{g(rng), g(rng), g(rng)};
  const double dot = r[0] * x[0] + r[1] * x[1] + r[2] * x[2];
  for (int i = 0; i < 3; ++i) r[i] -= dot * x[i];
  const double n = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
  Vec3 y;
  for (int i = 0; i < 3; ++i) y[i] = std::cos(d) * x[i] + std::sin(d) * r[i] / n;
  const double m = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
  for (double& v : y) v /= m;
  return y;
}

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec3 x{g(rng), g(rng), g(rng)};
  const double n = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  for (double& v : x) v /= n;
  return x;
}

Outcome unit_variance() {
  const auto spec = default_sphere();
  const PointSet one = sphere_points({{0.3, -0.4, std::sqrt(0.75)}});
  const SpectralSampler sampler(spec.spectrum, spec.scheme, one, {false, true, false});
  const std::size_t N = 100000;
  std::vector<double> h(N);
  sampler.sample_block(101, 0, N, nullptr, h.data(), nullptr);
  double m2 = 0.0, m4 = 0.0;
  for (double x : h) {
    m2 += x * x;
    m4 += x * x * x * x;
  }
  m2 /= N;
  m4 /= N;
  const double se = std::sqrt((m4 - m2 * m2) / N);
  const double total = spec.scheme.materialized_mass + spec.scheme.tail_mass;
  const bool ok = std::abs(m2 - 1.0) < 3 * se && std::abs(total - 1.0) < 1e-12;
  return {ok, fmt("var %.5f, SE %.5f, z %.2f; materialised+tail-1 = %.1e", m2, se, (m2 - 1) / se, total - 1)};
}

Outcome covariance_oracle() {
  const auto spec = default_sphere();
  std::mt19937_64 rng(2718);
  std::vector<Vec3> pts;
  std::vector<double> dist;
  for (int k = 0; k < 10; ++k) {
    const double d = 0.05 + k * (kPi - 0.1) / 9.0;
    const Vec3 x = random_unit(rng);
    pts.push_back(x);
    pts.push_back(at_distance(x, d, rng));
    dist.push_back(spherical_distance(pts[2 * k], pts[2 * k + 1]));
  }
  const PointSet grid = sphere_points(pts);

  // Closed form against explicit harmonic sums.
  const int L = 12;
  std::vector<double> yx(harmonic_count(L)), yy(harmonic_count(L));
  double worst_brute = 0.0;
  for (int k = 0; k < 10; ++k) {
    real_harmonics(pts[2 * k], L, yx.data());
    real_harmonics(pts[2 * k + 1], L, yy.data());
    double brute = 0.0;
    for (int m = 1; m <= L; ++m) {
      const double w = 4 * kPi * spec.scheme.values[m - 1] / (2 * m + 1);
      for (int j = 0; j <= 2 * m; ++j) brute += w * yx[harmonic_index(m, j)] * yy[harmonic_index(m, j)];
    }
    worst_brute = std::max(worst_brute, std::abs(brute - covariance_h_sphere(spec, dist[k])));
  }

  const SpectralSampler sampler(spec.spectrum, spec.scheme, grid, {false, true, false});
  const std::size_t N = 100000, P = grid.size();
  std::vector<double> s(10, 0.0), ss(10, 0.0), h(P * kDrawBlock);
  for (std::size_t first = 0; first < N; first += kDrawBlock) {
    const std::size_t n = std::min<std::size_t>(kDrawBlock, N - first);
    sampler.sample_block(202, first, n, nullptr, h.data(), nullptr);
    for (std::size_t j = 0; j < n; ++j)
      for (int k = 0; k < 10; ++k) {
        const double p = h[j * P + 2 * k] * h[j * P + 2 * k + 1];
        s[k] += p;
        ss[k] += p * p;
      }
  }
  double worst_z = 0.0;
  for (int k = 0; k < 10; ++k) {
    const double mean = s[k] / N, se = std::sqrt((ss[k] / N - mean * mean) / N);
    worst_z = std::max(worst_z, std::abs(mean - covariance_h_sphere(spec, dist[k])) / se);
  }
  return {worst_z < 3.0 && worst_brute < 1e-10,
          fmt("10 pairs, max |z| %.2f; closed form vs harmonic sum max diff %.1e", worst_z, worst_brute)};
}

Outcome adler_taylor_constant() {
  const auto spec = default_sphere();
  const double h = 1e-4;
  const double d2 = (2 * covariance_h_sphere(spec, h) - 2 * covariance_h_sphere(spec, 0.0)) / (h * h);
  const double C = at_metric_constant(spec.scheme, spec.spectrum);
  double direct = 0.0;
  for (int m = 1; m <= 12; ++m) direct += spec.scheme.values[m - 1] * m * (m + 1.0) / 2.0;
  const double rel = std::abs(-d2 - C) / C;
  return {rel < 1e-6 && std::abs(direct - C) < 1e-14 * C, fmt("-r''(0) %.10f, C %.10f, rel %.1e", -d2, C, rel)};
}

Outcome euler_curve_check() {
  const auto spec = default_sphere();
  const Triangulation mesh = icosphere(5);
  std::vector<double> u;
  for (int i = 0; i < 20; ++i) u.push_back(1.0 + 2.5 * i / 19.0);
  McOptions opt;
  opt.samples = 2000;
  opt.seed = 303;
  const EulerCurve c = euler_curve(spec, mesh, u, opt);
  int within = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double z = std::abs(c.mean[i] - c.predicted[i]) / c.standard_error[i];
    within += z < 3.0;
    worst = std::max(worst, z);
  }
  return {within >= 18, fmt("%d/20 thresholds within 3 SE (max |z| %.2f), L2 = %.4f, %zu vertices", within,
                            worst, c.lk.L2, mesh.vertices.size())};
}

Outcome sign_change_sphere() {
  const auto spec = default_sphere(FieldKind::V);
  const PointSet grid = fibonacci_sphere(4096), fine = fibonacci_sphere(16384);
  const std::vector<double> amps{1 / 2.5, 1 / 3.0, 1 / 3.5};
  McOptions opt;
  opt.samples = 100000;
  opt.seed = 404;
  std::vector<double> sup;
  const auto reports = estimate_p2(spec, amps, grid, opt, &fine, &sup);
  const double sigma = std::sqrt(variance_summary(spec, grid).sigma2_sup);
  double e_sup = 0.0;
  for (double x : sup) e_sup += x;
  e_sup /= static_cast<double>(sup.size());
  const double C1 = mills_lower_constant(sigma, amps.front()), C2 = concentration_alpha(e_sup, sigma);
  bool ok = true;
  std::string detail;
  for (const auto& r : reports) {
    const auto pred = sphere_p2_prediction(spec.scheme, r.amplitude);
    const double ratio = r.estimate / pred.value;
    const TwoSidedBound b = p2_two_sided(r.amplitude, sigma, C1, C2);
    const bool sandwich = b.lower <= r.estimate + 3 * r.standard_error && r.estimate - 3 * r.standard_error <= b.upper;
    ok = ok && ratio > 0.5 && ratio < 2.0 && sandwich && pred.warnings.empty();
    detail += fmt("1/a=%.1f MC %.5f±%.5f pred %.5f ratio %.3f [%.2e, %.2e] dref %+.1e; ", r.threshold,
                  r.estimate, r.standard_error, pred.value, ratio, b.lower, b.upper, *r.refinement_delta);
  }
  return {ok, detail + fmt("C1_low %.4f, C2_up %.4f", C1, C2)};
}

Outcome volume_identity() {
  const auto spec = default_sphere();
  const PointSet grid = fibonacci_sphere(1024);
  const SpectralSampler sampler(spec.spectrum, spec.scheme, grid, {true, false, false});
  const std::size_t N = 10000;
  std::vector<double> f(grid.size() * N);
  sampler.sample_block(505, 0, N, f.data(), nullptr, nullptr);
  bool ok = expected_volume(spec, grid, 0.0, 2) == 4 * kPi;
  std::string detail = fmt("a=0: %.17g; ", expected_volume(spec, grid, 0.0, 2));
  for (double a : {0.1, 0.5}) {
    double s = 0.0, ss = 0.0;
    FieldSample one;
    for (std::size_t j = 0; j < N; ++j) {
      one.f.assign(f.begin() + j * grid.size(), f.begin() + (j + 1) * grid.size());
      const double v = sample_volume(one, grid, a, 2);
      s += v;
      ss += v * v;
    }
    const double mean = s / N, se = std::sqrt((ss / N - mean * mean) / N);
    const double expect = expected_volume(spec, grid, a, 2);
    ok = ok && std::abs(mean - expect) < 3 * se;
    detail += fmt("a=%.1f MC %.6f±%.6f exact %.6f; ", a, mean, se, expect);
  }
  return {ok, detail};
}

// P(A + B > t) for independent Rayleigh(s) amplitudes: the law of the maximum
// of a single-level torus field with eigenvalue 1.
double rayleigh_sum_tail(double t, double s) {
  const int n = 4000;
  auto g = [&](double x) {
    return x / (s * s) * std::exp(-x * x / (2 * s * s)) * std::exp(-(t - x) * (t - x) / (2 * s * s));
  };
  double acc = g(0) + g(t);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * g(t * i / n);
  return acc * t / (3.0 * n) + std::exp(-t * t / (2 * s * s));
}

Outcome linf_torus() {
  // Level 1 (|k|² = 1) with σ_h² = 0.64 and R0 = 0.
  const auto t2 = SpectrumModel::flat_torus2(1);
  const double sigma2 = 0.64;
  RandomFieldSpec spec{t2, make_explicit({std::sqrt(sigma2 * kPi * kPi)}, Indexing::PerEigenfunction, t2),
                       FieldKind::W, ReferenceCurvature::uniform(0.0)};
  const PointSet grid = torus_lattice(32);
  std::vector<LinfPoint> pts;
  for (double u : {0.05, 0.1})
    for (double r : {3.0, 4.0}) pts.push_back({u / r, u});
  McOptions opt;
  opt.samples = 1000000;
  opt.seed = 707;
  const auto reports = estimate_linf(spec, pts, grid, opt, DeviationMode::Scalar2D);
  const double sw = std::sqrt(variance_summary(spec, grid).sigma2_sup);
  bool ok = true;
  std::string detail;
  for (const auto& r : reports) {
    const double asym = linf_log_asymptote(r.threshold, r.amplitude, sw).value;
    const double ratio = std::log(r.estimate) / asym;
    // Exact law: sup|D| > u iff S e^{aS} > u/a with S the maximum of h.
    const double target = r.threshold / r.amplitude;
    double lo = 0.0, hi = target;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (mid * std::exp(r.amplitude * mid) > target ? hi : lo) = mid;
    }
    const double exact = rayleigh_sum_tail(lo, sw / std::sqrt(2.0));
    ok = ok && ratio >= 0.8 && ratio <= 1.25;
    detail += fmt("u=%.2f u/a=%.0f: ratio %.3f (exact law %.3f); ", r.threshold, target, ratio,
                  std::log(exact) / asym);
  }
  return {ok, detail + "finite-u factor e^{-2u} caps the ratio below 0.82 at u = 0.1"};
}

Outcome heat_asymptotics() {
  const auto s2 = SpectrumModel::sphere2(2);
  const HeatVariance small = heat_variance(s2, 0.01);
  const double r_small = 4 * kPi * 0.01 * small.sup;
  bool ok = std::abs(r_small - 1.0) < 0.05;
  std::string detail = fmt("4πTσ² at T=0.01: %.4f (%d levels); ", r_small, small.levels_used);
  for (double T : {6.0, 8.0, 12.0}) {
    const double r = heat_variance(s2, T).sup * std::exp(2 * T) / (3 / (4 * kPi));
    ok = ok && std::abs(r - 1.0) < 0.01;
    detail += fmt("T=%.0f: %.8f; ", T, r);
  }
  return {ok, detail};
}

Outcome nd_constants() {
  double worst_res = 0.0, worst_exp = 0.0;
  bool in_range = true;
  int count = 0;
  for (int n : {3, 4, 5, 8})
    for (int e = -60; e <= 60; ++e) {
      const double kappa = std::pow(10.0, e / 10.0), sigma2 = 1.0;
      const double sv = std::sqrt(kappa * sigma2 * n * (n - 2) / (4.0 * (n - 1)));
      const NdConstants c = nd_positive_constants(n, sv, sigma2);
      const double res = std::abs(c.delta0 * c.delta0 + c.kappa * c.delta0 - c.kappa) /
                         std::max({c.kappa, c.delta0 * c.delta0, c.kappa * c.delta0});
      const double ex = std::max(std::abs(c.exponent_negative - c.B), std::abs(c.exponent_positive - c.B)) / c.B;
      worst_res = std::max(worst_res, res);
      worst_exp = std::max(worst_exp, ex);
      in_range = in_range && c.delta0 > 0 && c.delta0 < 1;
      ++count;
    }
  const NdConstants k = nd_positive_constants(4, 1.0, 1.0);
  const bool triple = std::abs(k.kappa - 1.5) < 1e-15 &&
                      std::abs(k.delta0 - (std::sqrt(8.25) - 1.5) / 2) < 1e-14 &&
                      std::abs(k.B - (3.5 - std::sqrt(8.25)) / 24) < 1e-14;
  return {worst_res < 1e-12 && worst_exp < 1e-12 && in_range && triple,
          fmt("%d (n, κ) points in κ ∈ [1e-6, 1e6]: max residual %.1e, max exponent mismatch %.1e; κ=1.5 triple %s",
              count, worst_res, worst_exp, triple ? "ok" : "off")};
}

Outcome appendix_validity() {
  const Matrix3 o1 = omega_block(2.0), o2 = omega_block(6.0);
  const Matrix3 want1{{{1, 1, 0}, {1, 1, 0}, {0, 0, 0}}}, want2{{{12, 6, 0}, {6, 12, 0}, {0, 0, 3}}};
  bool exact = o1 == want1 && o2 == want2;
  const Attainability m1 = attainability_of(level_covariance_block(2.0));
  const Attainability m2 = attainability_of(level_covariance_block(6.0));
  const Attainability sum = attainability_matrix(make_sphere_normalized(8.0, 12), 12);

  // Degeneracy flag against the antipodal covariance over all 4-level patterns.
  const auto s2 = SpectrumModel::sphere2(4);
  int agree = 0;
  for (int mask = 1; mask < 16; ++mask) {
    std::vector<double> c(4, 0.0);
    for (int m = 0; m < 4; ++m)
      if (mask & (1 << m)) c[m] = 0.25;
    RandomFieldSpec spec{s2, make_explicit(c, Indexing::PerEigenspace, s2)};
    const bool has_odd = (mask & 0b0101) != 0;
    const bool antipodal_differs = covariance_h_sphere(spec, kPi) < covariance_h_sphere(spec, 0.0) - 1e-12;
    agree += degeneracy_check(spec.scheme) == has_odd && has_odd == antipodal_differs;
  }
  const bool ok = exact && !m1.positive_definite && m2.positive_definite && sum.positive_definite && agree == 15;
  return {ok, fmt("Ω blocks %s; C_1 min eig %.1e (singular), C_2 min eig %.3f; Σc_mC_m min eig %.4f; "
                  "degeneracy/antipodal agreement %d/15",
                  exact ? "exact" : "off", m1.min_eigenvalue, m2.min_eigenvalue, sum.min_eigenvalue, agree)};
}

Outcome q_curvature_checks() {
  bool levels = true;
  for (int m = 1; m <= 50; ++m) {
    const double want = double(m) * (m + 1) * (m + 2) * (m + 3);
    const SpectralLevel l = paneitz_level_s4(m);
    levels = levels && l.eigenvalue == want &&
             std::abs(paneitz_eigenvalue_einstein(4, 12.0, m * (m + 3.0)) - want) <= 1e-12 * want;
  }
  const double Q0 = q_curvature_dim4(0.0, 12.0, 36.0);
  const auto s4 = SpectrumModel::round_sphere4_paneitz(1);
  const double sv = std::sqrt(q_sigma_v_single_level(0.02, s4.level(1).eigenvalue, s4.level(1).multiplicity,
                                                     s4.volume, Q0));
  const double C1 = mills_lower_constant(sv, 0.1), C2 = 1.0;
  std::vector<TwoSidedBound> b;
  for (double a : {1e-1, 1e-2, 1e-3}) b.push_back(q_sign_bounds(a, sv, C1, C2));
  const double L = std::abs(b[2].limit);
  const double gap = std::max(std::abs(b[2].lower_limit - b[2].limit), std::abs(b[2].upper_limit - b[2].limit)) / L;
  const double drift = std::max(std::abs(b[2].lower_limit - b[1].lower_limit), std::abs(b[2].upper_limit - b[1].upper_limit)) / L;
  const bool ok = levels && Q0 == 3.0 && round_s4_q_curvature() == 3.0 && gap < 0.05 && drift < 0.05;
  return {ok, fmt("levels m<=50 %s; Q0 = %.15g; σ_v² %.5f; a=1e-3 gap %.1e, drift %.1e", levels ? "exact" : "off",
                  Q0, sv * sv, gap, drift)};
}

Outcome reproducibility() {
#ifdef RANDCURV_HAVE_RUNNER
  namespace fs = std::filesystem;
  using namespace randcurv::cli;
  const std::vector<std::pair<std::string, std::string>> runs{
      {"sample", "[run]\ngrid = 500\n[sample]\ndraws = 2\na = 0.2\n"},
      {"p2", "[run]\nsamples = 3000\ngrid = 1024\n[p2]\namplitudes = 0.4, 0.3\n"},
      {"euler", "[run]\nsamples = 300\ndepth = 3\n[euler]\nthresholds = 0, 1, 2\n"},
      {"linf", "[run]\ngeometry = torus2\nscheme = power_law\ns = 2\ntruncation = 4\ntail_tolerance = 1\n"
               "samples = 5000\ngrid = 16\n[linf]\nu = 0.1\nratio = 2, 3\n"},
      {"heat", "[run]\n[heat]\nT = 0.1, 1\n"},
      {"bounds", "[bounds]\nn = 3\n"},
      {"qsign", "[run]\ngeometry = sphere4\n"},
  };
  const fs::path root = fs::temp_directory_path() / fmt("randcurv_acceptance_%d", static_cast<int>(::getpid()));
  std::size_t files = 0, same = 0;
  std::string bad;
  for (const auto& [cmd, text] : runs) {
    ExperimentConfig cfg = parse_config(text + "", cmd);
    cfg.seed = 909;
    cfg.seed_source = "flag";
    const RunRecord one = run_command(cfg, {1, (root / (cmd + "_1")).string()});
    const RunRecord eight = run_command(cfg, {8, (root / (cmd + "_8")).string()});
    for (std::size_t i = 0; i < one.files.size(); ++i) {
      if (one.files[i].ends_with(".json")) continue;
      auto slurp = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream s;
        s << in.rdbuf();
        return s.str();
      };
      ++files;
      if (slurp(one.files[i]) == slurp(eight.files[i])) ++same;
      else bad += " " + one.files[i];
    }
  }
  fs::remove_all(root);
  return {files > 0 && same == files, fmt("%zu/%zu CSV files byte-identical under 1 and 8 workers", same, files) + bad};
#else
  return {false, "runner library not built (RANDCURV_BUILD_TOOLS=OFF)"};
#endif
}

}  // namespace

int main(int argc, char** argv) {
  bool strict = false;
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--strict") == 0) strict = true;
    else only.insert(std::atoi(argv[i]));
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"unit-variance construction", unit_variance},
      {"covariance oracle", covariance_oracle},
      {"Adler-Taylor constant", adler_taylor_constant},
      {"Euler-characteristic curve", euler_curve_check},
      {"sign-change probability (sphere)", sign_change_sphere},
      {"volume identity", volume_identity},
      {"L-infinity asymptotic (flat torus)", linf_torus},
      {"heat-kernel asymptotics", heat_asymptotics},
      {"n>2 constants", nd_constants},
      {"attainability and degeneracy", appendix_validity},
      {"Q-curvature", q_curvature_checks},
      {"reproducibility across workers", reproducibility},
  };
  int unexpected = 0, failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %s: %s (%.1fs)%s\n    %s\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                secs, !o.pass && kKnownRed.count(id) ? " [known red]" : "", o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) {
      ++failed;
      if (!kKnownRed.count(id)) ++unexpected;
    }
  }
  std::printf("%d failed, %d unexpected\n", failed, unexpected);
  return (strict ? failed : unexpected) ? 1 : 0;
}
