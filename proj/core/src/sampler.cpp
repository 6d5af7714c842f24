#include "randcurv/sampler.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "randcurv/harmonics.hpp"

namespace randcurv {

namespace {

constexpr std::size_t kTile = 256;  // points per tile in the accumulation kernel
constexpr std::size_t kColumns = 8;

// out[j·P + p] = Σ_k table[k·P + p] · w[j·K + k], accumulated in mode order so
// the result for one column does not depend on how columns are batched.
void accumulate(const double* table, std::size_t P, std::size_t K, const double* w, std::size_t J,
                double* out) {
  for (std::size_t j0 = 0; j0 < J; j0 += kColumns) {
    const std::size_t jn = std::min(kColumns, J - j0);
    for (std::size_t p0 = 0; p0 < P; p0 += kTile) {
      const std::size_t pn = std::min(kTile, P - p0);
      for (std::size_t j = 0; j < jn; ++j) std::fill_n(out + (j0 + j) * P + p0, pn, 0.0);
      for (std::size_t k = 0; k < K; ++k) {
        const double* b = table + k * P + p0;
        for (std::size_t j = 0; j < jn; ++j) {
          const double c = w[(j0 + j) * K + k];
          double* o = out + (j0 + j) * P + p0;
          for (std::size_t p = 0; p < pn; ++p) o[p] += b[p] * c;
        }
      }
    }
  }
}

struct ModeLayout {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> keys;
  std::vector<double> gf, gh;
  std::vector<long> torus_norms;  // per positive level (torus only)
};

ModeLayout layout(const SpectrumModel& spectrum, const CoefficientScheme& scheme) {
  if (scheme.truncation < 1) throw std::invalid_argument("sampler: truncation M = 0");
  if (scheme.truncation > spectrum.level_count())
    throw std::invalid_argument("sampler: truncation exceeds the spectrum");
  if (spectrum.geometry == Geometry::RoundSphere4Paneitz)
    throw std::invalid_argument("sampler: fields on S⁴ are not sampled (closed-form constants only)");
  ModeLayout out;
  for (int m = 1; m <= scheme.truncation; ++m) {
    const auto& lvl = spectrum.level(m);
    const double g = mode_amplitude(scheme, spectrum, m);
    int count = lvl.multiplicity;
    if (spectrum.geometry == Geometry::FlatTorus2) out.torus_norms.push_back(std::lround(lvl.eigenvalue));
    for (int k = 0; k < count; ++k) {
      out.keys.emplace_back(static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(k));
      out.gf.push_back(g);
      out.gh.push_back(-lvl.eigenvalue * g);
    }
  }
  for (std::size_t i = 0; i < scheme.negative_values.size(); ++i) {
    const double t = scheme.negative_values[i];
    const auto& lvl = spectrum.negative_levels[i];
    for (int k = 0; k < lvl.multiplicity; ++k) {
      out.keys.emplace_back(kNegativeLevelBase + static_cast<std::uint32_t>(i),
                            static_cast<std::uint32_t>(k));
      out.gf.push_back(t);
      out.gh.push_back(lvl.eigenvalue * t);
    }
  }
  return out;
}

void check_grid(const SpectrumModel& spectrum, const PointSet& grid) {
  if (grid.empty()) throw std::invalid_argument("sampler: empty grid");
  switch (spectrum.geometry) {
    case Geometry::Sphere2:
      if (grid.kind != PointSet::Kind::Sphere) throw std::invalid_argument("sampler: S² needs a sphere grid");
      for (const auto& p : grid.points)
        if (std::abs(std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) - 1.0) > 1e-9)
          throw std::invalid_argument("sampler: grid point off the unit sphere");
      break;
    case Geometry::FlatTorus2:
      if (grid.kind != PointSet::Kind::Torus) throw std::invalid_argument("sampler: T² needs a torus grid");
      break;
    case Geometry::UserSupplied:
      if (grid.size() != spectrum.user->point_count)
        throw std::invalid_argument("sampler: grid size differs from the spectrum file");
      break;
    default:
      break;
  }
}

}  // namespace

SpectralSampler::SpectralSampler(const SpectrumModel& spectrum, const CoefficientScheme& scheme,
                                 const PointSet& grid, SampleRequest what)
    : what_(what), points_(grid.size()) {
  check_grid(spectrum, grid);
  ModeLayout lay = layout(spectrum, scheme);
  keys_ = std::move(lay.keys);
  gf_ = std::move(lay.gf);
  gh_ = std::move(lay.gh);
  const std::size_t K = keys_.size(), P = points_;
  if (what_.gradient && spectrum.geometry == Geometry::UserSupplied)
    throw std::invalid_argument("sampler: gradients are unavailable for user spectra");
  basis_.assign(K * P, 0.0);
  if (what_.gradient) {
    grad1_.assign(K * P, 0.0);
    grad2_.assign(K * P, 0.0);
  }
  std::vector<double> v(K), g1(K), g2(K);
  for (std::size_t p = 0; p < P; ++p) {
    double* gp1 = what_.gradient ? g1.data() : nullptr;
    double* gp2 = what_.gradient ? g2.data() : nullptr;
    if (spectrum.geometry == Geometry::Sphere2) {
      real_harmonics(grid.points[p], scheme.truncation, v.data(), gp1, gp2);
    } else if (spectrum.geometry == Geometry::FlatTorus2) {
      std::size_t off = 0;
      for (std::size_t m = 0; m < lay.torus_norms.size(); ++m) {
        torus_modes(grid.points[p], lay.torus_norms[m], v.data() + off, gp1 ? gp1 + off : nullptr,
                    gp2 ? gp2 + off : nullptr);
        off += static_cast<std::size_t>(spectrum.level(static_cast<int>(m) + 1).multiplicity);
      }
    } else {
      const auto& data = *spectrum.user;
      std::size_t k = 0;
      for (int m = 0; m < scheme.truncation; ++m) v[k++] = data.positive[m][p];
      for (std::size_t i = 0; i < scheme.negative_values.size(); ++i) v[k++] = data.negative[i][p];
    }
    for (std::size_t k = 0; k < K; ++k) {
      basis_[k * P + p] = v[k];
      if (what_.gradient) {
        grad1_[k * P + p] = g1[k];
        grad2_[k * P + p] = g2[k];
      }
    }
  }
}

void SpectralSampler::draw_gaussians(std::uint64_t seed, std::uint64_t draw_index, double* out) const {
  for (std::size_t k = 0; k < keys_.size(); ++k)
    out[k] = standard_normal({seed, draw_index, keys_[k].first, keys_[k].second});
}

void SpectralSampler::evaluate(const double* a, std::size_t count, double* f, double* h,
                               double* gradsq) const {
  const std::size_t K = keys_.size(), P = points_;
  std::vector<double> w(K * count);
  if (f || gradsq) {
    for (std::size_t j = 0; j < count; ++j)
      for (std::size_t k = 0; k < K; ++k) w[j * K + k] = a[j * K + k] * gf_[k];
    if (f) accumulate(basis_.data(), P, K, w.data(), count, f);
    if (gradsq) {
      if (!what_.gradient) throw std::logic_error("sampler built without gradient tables");
      std::vector<double> g1(P * count), g2(P * count);
      accumulate(grad1_.data(), P, K, w.data(), count, g1.data());
      accumulate(grad2_.data(), P, K, w.data(), count, g2.data());
      for (std::size_t i = 0; i < P * count; ++i) gradsq[i] = g1[i] * g1[i] + g2[i] * g2[i];
    }
  }
  if (h) {
    for (std::size_t j = 0; j < count; ++j)
      for (std::size_t k = 0; k < K; ++k) w[j * K + k] = a[j * K + k] * gh_[k];
    accumulate(basis_.data(), P, K, w.data(), count, h);
  }
}

void SpectralSampler::sample_block(std::uint64_t seed, std::uint64_t first, std::size_t count,
                                   double* f, double* h, double* gradsq) const {
  const std::size_t K = keys_.size();
  std::vector<double> a(K * count);
  for (std::size_t j = 0; j < count; ++j) draw_gaussians(seed, first + j, a.data() + j * K);
  evaluate(a.data(), count, f, h, gradsq);
}

FieldSample SpectralSampler::from_gaussians(const std::vector<double>& gaussians) const {
  if (gaussians.size() != keys_.size())
    throw std::invalid_argument("from_gaussians: expected " + std::to_string(keys_.size()) + " draws");
  FieldSample s;
  s.gaussians = gaussians;
  if (what_.f) s.f.resize(points_);
  if (what_.h) s.h.resize(points_);
  if (what_.gradient) s.gradsq.resize(points_);
  evaluate(gaussians.data(), 1, what_.f ? s.f.data() : nullptr, what_.h ? s.h.data() : nullptr,
           what_.gradient ? s.gradsq.data() : nullptr);
  return s;
}

FieldSample SpectralSampler::sample(std::uint64_t seed, std::uint64_t draw_index) const {
  std::vector<double> a(keys_.size());
  draw_gaussians(seed, draw_index, a.data());
  FieldSample s = from_gaussians(a);
  s.seed = seed;
  s.draw_index = draw_index;
  return s;
}

FieldSample reference_sample(const SpectrumModel& spectrum, const CoefficientScheme& scheme,
                             const PointSet& grid, std::uint64_t seed, std::uint64_t draw_index,
                             bool gradient) {
  check_grid(spectrum, grid);
  const ModeLayout lay = layout(spectrum, scheme);
  const std::size_t K = lay.keys.size();
  std::vector<double> a(K);
  for (std::size_t k = 0; k < K; ++k)
    a[k] = standard_normal({seed, draw_index, lay.keys[k].first, lay.keys[k].second});

  FieldSample s;
  s.seed = seed;
  s.draw_index = draw_index;
  s.gaussians = a;
  s.f.assign(grid.size(), 0.0);
  s.h.assign(grid.size(), 0.0);
  if (gradient) s.gradsq.assign(grid.size(), 0.0);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    std::size_t k = 0;
    double g1 = 0.0, g2 = 0.0;
    for (int m = 1; m <= scheme.truncation; ++m) {
      const int n = spectrum.level(m).multiplicity;
      std::vector<double> v(static_cast<std::size_t>(n)), d1(v.size()), d2(v.size());
      if (spectrum.geometry == Geometry::Sphere2) {
        // Degree-m block of the full table.
        std::vector<double> all(harmonic_count(m)), all1(all.size()), all2(all.size());
        real_harmonics(grid.points[p], m, all.data(), gradient ? all1.data() : nullptr,
                       gradient ? all2.data() : nullptr);
        for (int i = 0; i < n; ++i) {
          v[i] = all[harmonic_index(m, i)];
          d1[i] = all1[harmonic_index(m, i)];
          d2[i] = all2[harmonic_index(m, i)];
        }
      } else if (spectrum.geometry == Geometry::FlatTorus2) {
        torus_modes(grid.points[p], lay.torus_norms[m - 1], v.data(),
                    gradient ? d1.data() : nullptr, gradient ? d2.data() : nullptr);
      } else {
        v[0] = spectrum.user->positive[m - 1][p];
      }
      for (int i = 0; i < n; ++i, ++k) {
        s.f[p] += a[k] * lay.gf[k] * v[i];
        s.h[p] += a[k] * lay.gh[k] * v[i];
        g1 += a[k] * lay.gf[k] * d1[i];
        g2 += a[k] * lay.gf[k] * d2[i];
      }
    }
    for (std::size_t i = 0; i < scheme.negative_values.size(); ++i, ++k) {
      const double v = spectrum.user->negative[i][p];
      s.f[p] += a[k] * lay.gf[k] * v;
      s.h[p] += a[k] * lay.gh[k] * v;
    }
    if (gradient) s.gradsq[p] = g1 * g1 + g2 * g2;
  }
  return s;
}

CholeskySampler::CholeskySampler(const RandomFieldSpec& spec, const PointSet& grid) : n_(grid.size()) {
  const std::vector<double> cov = covariance_matrix(spec, grid);
  Eigen::MatrixXd c = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      cov.data(), static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
  const double step = 1e-12 * c.trace() / static_cast<double>(n_);
  for (int attempt = 0; attempt <= 3; ++attempt) {
    if (attempt > 0) {
      c.diagonal().array() += step;
      jitter_ += step;
      std::ostringstream note;
      note << "cholesky jitter " << attempt << ": added " << step << " to the diagonal (total "
           << jitter_ << ")";
      log_.push_back(note.str());
    }
    Eigen::LLT<Eigen::MatrixXd> llt(c);
    if (llt.info() == Eigen::Success) {
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> l = llt.matrixL();
      lower_.assign(l.data(), l.data() + l.size());
      return;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c, Eigen::EigenvaluesOnly);
  std::ostringstream msg;
  msg << "covariance matrix is indefinite beyond jitter tolerance; most negative eigenvalue "
      << eig.eigenvalues().minCoeff();
  throw std::runtime_error(msg.str());
}

CholeskySample CholeskySampler::sample(std::uint64_t seed, std::uint64_t draw_index) const {
  CholeskySample s;
  s.seed = seed;
  s.draw_index = draw_index;
  s.jitter = jitter_;
  s.log = log_;
  std::vector<double> z(n_);
  for (std::size_t i = 0; i < n_; ++i)
    z[i] = standard_normal({seed, draw_index, kCholeskyLevel, static_cast<std::uint32_t>(i)});
  s.values.assign(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= i; ++j) acc += lower_[i * n_ + j] * z[j];
    s.values[i] = acc;
  }
  return s;
}

CholeskySample sample_cholesky(const RandomFieldSpec& spec, const PointSet& grid,
                               std::uint64_t seed, std::uint64_t draw_index) {
  return CholeskySampler(spec, grid).sample(seed, draw_index);
}

void write_sample_csv(std::ostream& out, const PointSet& grid, const FieldSample& sample) {
  const bool grad = !sample.gradsq.empty();
  out << "index,x,y,z,weight,f,h" << (grad ? ",gradsq" : "") << '\n';
  out << std::setprecision(17);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& p = grid.points[i];
    out << i << ',' << p[0] << ',' << p[1] << ',' << p[2] << ',' << grid.weights[i] << ','
        << (sample.f.empty() ? 0.0 : sample.f[i]) << ',' << (sample.h.empty() ? 0.0 : sample.h[i]);
    if (grad) out << ',' << sample.gradsq[i];
    out << '\n';
  }
}

}  // namespace randcurv
