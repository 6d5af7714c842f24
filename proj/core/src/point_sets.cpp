#include "randcurv/point_sets.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

namespace randcurv {

namespace {

constexpr double kPi = std::numbers::pi;

double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

Vec3 normalized(const Vec3& v) {
  const double n = norm(v);
  return {v[0] / n, v[1] / n, v[2] / n};
}

Vec3 rotate_x(const Vec3& v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {v[0], c * v[1] - s * v[2], s * v[1] + c * v[2]};
}

}  // namespace

PointSet fibonacci_sphere(std::size_t n) {
  if (n == 0) throw std::invalid_argument("fibonacci_sphere: empty grid");
  PointSet set;
  set.kind = PointSet::Kind::Sphere;
  set.points.reserve(n);
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * static_cast<double>(i);
    set.points.push_back({r * std::cos(phi), r * std::sin(phi), z});
  }
  set.weights.assign(n, 4.0 * kPi / static_cast<double>(n));
  return set;
}

PointSet torus_lattice(std::size_t per_side) {
  if (per_side == 0) throw std::invalid_argument("torus_lattice: empty grid");
  PointSet set;
  set.kind = PointSet::Kind::Torus;
  const double step = 2.0 * kPi / static_cast<double>(per_side);
  for (std::size_t i = 0; i < per_side; ++i)
    for (std::size_t j = 0; j < per_side; ++j)
      set.points.push_back({step * static_cast<double>(i), step * static_cast<double>(j), 0.0});
  const double n = static_cast<double>(set.points.size());
  set.weights.assign(set.points.size(), 4.0 * kPi * kPi / n);
  return set;
}

PointSet sphere_points(std::vector<Vec3> points) {
  if (points.empty()) throw std::invalid_argument("sphere_points: empty grid");
  for (const auto& p : points)
    if (std::abs(norm(p) - 1.0) > 1e-9)
      throw std::invalid_argument("sphere_points: point of norm " + std::to_string(norm(p)));
  PointSet set;
  set.kind = PointSet::Kind::Sphere;
  set.points = std::move(points);
  set.weights.assign(set.points.size(), 4.0 * kPi / static_cast<double>(set.points.size()));
  return set;
}

PointSet Triangulation::as_point_set() const {
  PointSet set;
  set.kind = PointSet::Kind::Sphere;
  set.points = vertices;
  set.weights.assign(vertices.size(), 4.0 * kPi / static_cast<double>(vertices.size()));
  return set;
}

Triangulation icosphere(int depth) {
  if (depth < 0) throw std::invalid_argument("icosphere: negative depth");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0},
                         {0, -1, t}, {0, 1, t},  {0, -1, -t}, {0, 1, -t},
                         {t, 0, -1}, {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  std::vector<std::array<int, 3>> f = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
      {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (auto& p : v) p = rotate_x(normalized(p), 0.1234);

  for (int level = 0; level < depth; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      if (auto it = midpoint.find(key); it != midpoint.end()) return it->second;
      const Vec3 m = normalized({v[a][0] + v[b][0], v[a][1] + v[b][1], v[a][2] + v[b][2]});
      v.push_back(m);
      const int id = static_cast<int>(v.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(f.size() * 4);
    for (const auto& tri : f) {
      const int ab = mid(tri[0], tri[1]), bc = mid(tri[1], tri[2]), ca = mid(tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({tri[1], bc, ab});
      next.push_back({tri[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    f = std::move(next);
  }

  Triangulation mesh;
  mesh.vertices = std::move(v);
  mesh.faces = std::move(f);
  std::map<std::pair<int, int>, int> seen;
  for (const auto& tri : mesh.faces)
    for (int k = 0; k < 3; ++k) {
      const auto key = std::minmax(tri[k], tri[(k + 1) % 3]);
      if (seen.emplace(key, 0).second) mesh.edges.push_back({key.first, key.second});
    }
  return mesh;
}

void validate_closed_surface(const Triangulation& mesh) {
  const int nv = static_cast<int>(mesh.vertices.size());
  std::map<std::pair<int, int>, int> count;
  for (const auto& tri : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      if (tri[k] < 0 || tri[k] >= nv)
        throw std::invalid_argument("triangulation: face references missing vertex");
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
      throw std::invalid_argument("triangulation: degenerate face");
    for (int k = 0; k < 3; ++k) ++count[std::minmax(tri[k], tri[(k + 1) % 3])];
  }
  for (const auto& [edge, n] : count)
    if (n != 2)
      throw std::invalid_argument("triangulation: edge (" + std::to_string(edge.first) + "," +
                                  std::to_string(edge.second) + ") borders " +
                                  std::to_string(n) + " faces");
  if (count.size() != mesh.edges.size())
    throw std::invalid_argument("triangulation: edge list does not match faces");
}

double spherical_distance(const Vec3& x, const Vec3& y) {
  // atan2 form is accurate near 0 and π
  const Vec3 c = {x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]};
  const double dot = x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
  return std::atan2(norm(c), dot);
}

}  // namespace randcurv
