#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "randcurv/harmonics.hpp"
#include "randcurv/special.hpp"

using namespace randcurv;

namespace {

Vec3 from_angles(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Vec3 v{n(rng), n(rng), n(rng)};
  const double r = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  return {v[0] / r, v[1] / r, v[2] / r};
}

}  // namespace

TEST_SUITE("harmonics") {
  TEST_CASE("addition theorem") {
    const int L = 20;
    std::mt19937_64 rng(11);
    std::vector<double> yx(harmonic_count(L)), yy(harmonic_count(L));
    for (int trial = 0; trial < 100; ++trial) {
      const Vec3 x = random_unit(rng), y = random_unit(rng);
      real_harmonics(x, L, yx.data());
      real_harmonics(y, L, yy.data());
      const double t = x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
      for (int m = 1; m <= L; ++m) {
        double sum = 0.0, diag = 0.0;
        for (int k = 0; k < 2 * m + 1; ++k) {
          sum += yx[harmonic_index(m, k)] * yy[harmonic_index(m, k)];
          diag += yx[harmonic_index(m, k)] * yx[harmonic_index(m, k)];
        }
        const double N = 2 * m + 1.0;
        CHECK(std::abs(sum - N / (4 * std::numbers::pi) * legendre(m, t)) < 1e-10);
        CHECK(std::abs(diag - N / (4 * std::numbers::pi)) < 1e-10);
      }
    }
  }

  TEST_CASE("orthonormality by quadrature") {
    // Gauss-Legendre in cos θ (64 nodes) times a uniform φ rule (128 nodes).
    const int L = 6, nt = 64, np = 128;
    std::vector<double> nodes(nt), weights(nt);
    for (int i = 0; i < nt; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (nt + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= nt; ++k) {
          const double p2 = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        const double dp = nt * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) {
          weights[i] = 2.0 / ((1 - x * x) * dp * dp);
          break;
        }
      }
      nodes[i] = x;
    }
    const std::size_t K = harmonic_count(L);
    std::vector<double> gram(K * K, 0.0), y(K);
    for (int i = 0; i < nt; ++i)
      for (int j = 0; j < np; ++j) {
        const double phi = 2 * std::numbers::pi * j / np;
        real_harmonics(from_angles(std::acos(nodes[i]), phi), L, y.data());
        const double w = weights[i] * 2 * std::numbers::pi / np;
        for (std::size_t a = 0; a < K; ++a)
          for (std::size_t b = 0; b < K; ++b) gram[a * K + b] += w * y[a] * y[b];
      }
    for (std::size_t a = 0; a < K; ++a)
      for (std::size_t b = 0; b < K; ++b) CHECK(gram[a * K + b] == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-12).scale(1.0));
  }

  TEST_CASE("gradients match finite differences") {
    const int L = 12;
    const std::size_t K = harmonic_count(L);
    std::vector<double> v(K), gt(K), gp(K), vp(K), vm(K);
    const double h = 1e-6;
    // Includes points within 1e-3 of a pole.
    for (auto [theta, phi] : {std::pair{0.7, 1.3}, {2.1, -2.5}, {1e-3, 0.4}, {std::numbers::pi - 2e-3, 2.0}}) {
      real_harmonics(from_angles(theta, phi), L, v.data(), gt.data(), gp.data());
      real_harmonics(from_angles(theta + h, phi), L, vp.data());
      real_harmonics(from_angles(theta - h, phi), L, vm.data());
      for (std::size_t k = 0; k < K; ++k) CHECK(gt[k] == doctest::Approx((vp[k] - vm[k]) / (2 * h)).epsilon(1e-6).scale(10.0));
      real_harmonics(from_angles(theta, phi + h), L, vp.data());
      real_harmonics(from_angles(theta, phi - h), L, vm.data());
      for (std::size_t k = 0; k < K; ++k)
        CHECK(gp[k] == doctest::Approx((vp[k] - vm[k]) / (2 * h) / std::sin(theta)).epsilon(1e-5).scale(10.0));
    }
  }

  TEST_CASE("gradient norm at the pole is the limit of nearby points") {
    const int L = 5;
    const std::size_t K = harmonic_count(L);
    std::vector<double> v(K), gt(K), gp(K), v2(K), gt2(K), gp2(K);
    real_harmonics({0.0, 0.0, 1.0}, L, v.data(), gt.data(), gp.data());
    real_harmonics(from_angles(1e-7, 0.0), L, v2.data(), gt2.data(), gp2.data());
    for (std::size_t k = 0; k < K; ++k) {
      CHECK(std::isfinite(gt[k]));
      CHECK(gt[k] * gt[k] + gp[k] * gp[k] == doctest::Approx(gt2[k] * gt2[k] + gp2[k] * gp2[k]).epsilon(1e-5).scale(1.0));
    }
  }

  TEST_CASE("torus modes") {
    CHECK(torus_circle_vectors(25).size() == 12);
    CHECK(torus_half_vectors(25).size() == 6);
    CHECK(torus_half_vectors(1).size() == 2);
    // Orthonormality on a 16×16 lattice (exact for |k| < 8).
    const int G = 16;
    const double step = 2 * std::numbers::pi / G, w = step * step;
    std::vector<double> a(4), b(4), gram(16, 0.0);
    for (int i = 0; i < G; ++i)
      for (int j = 0; j < G; ++j) {
        torus_modes({i * step, j * step, 0.0}, 1, a.data());
        for (int p = 0; p < 4; ++p)
          for (int q = 0; q < 4; ++q) gram[p * 4 + q] += w * a[p] * a[q];
      }
    for (int p = 0; p < 4; ++p)
      for (int q = 0; q < 4; ++q) CHECK(gram[p * 4 + q] == doctest::Approx(p == q ? 1.0 : 0.0).scale(1.0));
    std::vector<double> v(8), gx(8), gy(8), vp(8), vm(8);
    const Vec3 x{0.3, 1.9, 0.0};
    torus_modes(x, 5, v.data(), gx.data(), gy.data());
    torus_modes({0.3 + 1e-6, 1.9, 0.0}, 5, vp.data());
    torus_modes({0.3 - 1e-6, 1.9, 0.0}, 5, vm.data());
    for (int k = 0; k < 8; ++k) CHECK(gx[k] == doctest::Approx((vp[k] - vm[k]) / 2e-6).epsilon(1e-6).scale(1.0));
  }
}
