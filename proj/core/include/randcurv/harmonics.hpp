#pragma once

// Orthonormal eigenfunction bases: real spherical harmonics on S² and real
// Fourier modes on the square torus [0, 2π]².

#include <cstddef>
#include <vector>

#include "randcurv/point_sets.hpp"

namespace randcurv {

/// Number of real harmonics of degree 1..L.
inline std::size_t harmonic_count(int max_degree) {
  return static_cast<std::size_t>((max_degree + 1) * (max_degree + 1) - 1);
}

/// Column of (l, k) in degree-major order, k = 0 for order 0, k = 2j-1 for
/// cos(jφ), k = 2j for sin(jφ).
inline std::size_t harmonic_index(int l, int k) {
  return static_cast<std::size_t>(l * l - 1 + k);
}

/// Values of all real orthonormal harmonics of degree 1..L at the unit vector
/// x, written to `values` (size harmonic_count(L)). When `grad_theta` and
/// `grad_phi` are non-null they receive the components of the surface
/// gradient along e_θ and e_φ. At the poles the frame is the limit along the
/// meridian φ = atan2(y, x) = 0, which is still orthonormal.
void real_harmonics(const Vec3& x, int max_degree, double* values, double* grad_theta = nullptr,
                    double* grad_phi = nullptr);

/// Half-plane representatives k of the lattice vectors with |k|² = n.
std::vector<std::array<int, 2>> torus_half_vectors(long n);

/// All lattice vectors with |k|² = n.
std::vector<std::array<int, 2>> torus_circle_vectors(long n);

/// Real Fourier modes cos(k·x)/(π√2), sin(k·x)/(π√2) for every half-plane
/// representative of the given norm, in the order cos, sin per vector.
/// Gradients are written as (∂x, ∂y).
void torus_modes(const Vec3& x, long norm, double* values, double* grad_x = nullptr,
                 double* grad_y = nullptr);

}  // namespace randcurv
