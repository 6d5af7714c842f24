#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace randcurv {

using Vec3 = std::array<double, 3>;

/// Evaluation points on a reference surface together with quadrature weights.
/// Sphere points are unit vectors; torus points store (x, y, 0) in [0, 2π)².
/// User-supplied grids are opaque (coordinates unused, only indices).
struct PointSet {
  enum class Kind { Sphere, Torus, Opaque };
  Kind kind = Kind::Opaque;
  std::vector<Vec3> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Quasi-uniform Fibonacci (golden-spiral) set on S² with equal weights 4π/N.
PointSet fibonacci_sphere(std::size_t n);

/// Uniform G×G lattice on the flat torus [0, 2π)², equal weights 4π²/G².
PointSet torus_lattice(std::size_t per_side);

/// Arbitrary unit vectors on S² with equal weights (throws on non-unit input).
PointSet sphere_points(std::vector<Vec3> points);

/// Closed triangulation of S²: vertices on the unit sphere plus faces.
struct Triangulation {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<std::array<int, 2>> edges;  // unique, i < j

  PointSet as_point_set() const;
};

/// Icosahedron subdivided `depth` times (10·4^depth + 2 vertices), projected to
/// the sphere. The base icosahedron is tilted so that no vertex lies on the z axis.
Triangulation icosphere(int depth);

/// Throws std::invalid_argument unless every edge borders exactly two faces and
/// every face references valid distinct vertices.
void validate_closed_surface(const Triangulation& mesh);

/// Great-circle distance between unit vectors.
double spherical_distance(const Vec3& x, const Vec3& y);

}  // namespace randcurv
