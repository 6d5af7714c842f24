#pragma once

// Samplers for the Gaussian fields: a spectral sampler driven by tabulated
// eigenfunctions and an exact Cholesky sampler on finite point sets.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "randcurv/fields.hpp"
#include "randcurv/point_sets.hpp"
#include "randcurv/rng.hpp"
#include "randcurv/spectral.hpp"

namespace randcurv {

struct FieldSample {
  std::uint64_t seed = 0;
  std::uint64_t draw_index = 0;
  std::vector<double> gaussians;  // mode order of the sampler
  std::vector<double> f;
  std::vector<double> h;
  std::vector<double> gradsq;     // |∇f|², empty unless requested
  std::vector<std::string> log;
};

struct SampleRequest {
  bool f = true;
  bool h = true;
  bool gradient = false;
};

/// f = Σ a_j g_j φ_j and h = -L f = -Σ a_j λ_j g_j φ_j (negative GJMS levels:
/// +μ). The draw a_j of mode j is standard_normal({seed, draw, level, index}).
class SpectralSampler {
 public:
  SpectralSampler(const SpectrumModel& spectrum, const CoefficientScheme& scheme,
                  const PointSet& grid, SampleRequest what = {});

  std::size_t mode_count() const { return keys_.size(); }
  std::size_t point_count() const { return points_; }
  const SampleRequest& request() const { return what_; }

  void draw_gaussians(std::uint64_t seed, std::uint64_t draw_index, double* out) const;

  FieldSample sample(std::uint64_t seed, std::uint64_t draw_index) const;

  /// Evaluates the fields for the given draws (forced Gaussians).
  FieldSample from_gaussians(const std::vector<double>& gaussians) const;

  /// Draws first..first+count-1 into column-major (points × count) buffers;
  /// any output pointer may be null. Results are bit-identical to sample().
  void sample_block(std::uint64_t seed, std::uint64_t first, std::size_t count, double* f,
                    double* h, double* gradsq) const;

  /// (level, index) key of every mode.
  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& keys() const { return keys_; }

 private:
  void evaluate(const double* gaussians, std::size_t count, double* f, double* h,
                double* gradsq) const;

  SampleRequest what_;
  std::size_t points_ = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> keys_;
  std::vector<double> basis_;   // column-major points × modes
  std::vector<double> grad1_;   // gradient components in an orthonormal frame
  std::vector<double> grad2_;
  std::vector<double> gf_;      // f amplitude per mode
  std::vector<double> gh_;      // h amplitude per mode
};

/// Point-by-point direct summation, independent of the tabulated path. Same
/// Gaussians as SpectralSampler for the same (seed, draw_index).
FieldSample reference_sample(const SpectrumModel& spectrum, const CoefficientScheme& scheme,
                             const PointSet& grid, std::uint64_t seed, std::uint64_t draw_index,
                             bool gradient = false);

struct CholeskySample {
  std::uint64_t seed = 0;
  std::uint64_t draw_index = 0;
  std::vector<double> values;
  double jitter = 0.0;
  std::vector<std::string> log;
};

/// Exact sampler of spec.which restricted to a finite point set. A jitter of
/// 1e-12·trace/N is added to the diagonal, at most three times, when the
/// factorisation fails.
class CholeskySampler {
 public:
  CholeskySampler(const RandomFieldSpec& spec, const PointSet& grid);

  CholeskySample sample(std::uint64_t seed, std::uint64_t draw_index) const;
  double jitter() const { return jitter_; }
  const std::vector<std::string>& log() const { return log_; }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> lower_;  // row-major Cholesky factor
  double jitter_ = 0.0;
  std::vector<std::string> log_;
};

CholeskySample sample_cholesky(const RandomFieldSpec& spec, const PointSet& grid,
                               std::uint64_t seed, std::uint64_t draw_index);

/// CSV with columns index,x,y,z,weight,f,h[,gradsq].
void write_sample_csv(std::ostream& out, const PointSet& grid, const FieldSample& sample);

}  // namespace randcurv
