#include "hcb/jacobi_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "json.hpp"

namespace hcb {

namespace {

constexpr double kDegenerate = 1e-12;

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

}  // namespace

PlaneSet::PlaneSet(const MassSequence& masses, std::array<Vec3, 6> normals)
    : masses_(masses), normals_(std::move(normals)) {}

int PlaneSet::slot(int i, int j) {
  if (i > j) std::swap(i, j);
  if (i < 1 || j > 4 || i == j) fail(ErrorKind::InvalidArgument, "pair labels must be distinct and in 1..4");
  static constexpr int table[4][4] = {{-1, 0, 1, 2}, {0, -1, 3, 4}, {1, 3, -1, 5}, {2, 4, 5, -1}};
  return table[i - 1][j - 1];
}

const Vec3& PlaneSet::normal(int i, int j) const { return normals_[slot(i, j)]; }

PlaneSet coincidence_normals(const MassSequence& masses) {
  if (masses.size() != 4) fail(ErrorKind::InvalidArgument, "coincidence planes are built for four particles");
  const double m1 = masses[0], m2 = masses[1], m3 = masses[2], m4 = masses[3];
  const double M = masses.total(), m12 = m1 + m2, m34 = m3 + m4;
  const double a1 = std::sqrt(m2 * m34 / (m1 * M));
  const double a2 = std::sqrt(m1 * m34 / (m2 * M));
  const double b3 = std::sqrt(m4 * m12 / (m3 * M));
  const double b4 = std::sqrt(m3 * m12 / (m4 * M));

  std::array<Vec3, 6> n;
  n[0] = Vec3(1, 0, 0);                    // 12
  n[1] = Vec3(a1, -b3, 1).normalized();    // 13
  n[2] = Vec3(a1, b4, 1).normalized();     // 14
  n[3] = Vec3(a2, b3, -1).normalized();    // 23
  n[4] = Vec3(a2, -b4, -1).normalized();   // 24
  n[5] = Vec3(0, 1, 0);                    // 34
  return PlaneSet(masses, n);
}

Vec3 relative_coordinates(const MassSequence& masses, const std::array<double, 4>& x) {
  if (masses.size() != 4) fail(ErrorKind::InvalidArgument, "relative coordinates are built for four particles");
  const double m1 = masses[0], m2 = masses[1], m3 = masses[2], m4 = masses[3];
  const double m12 = m1 + m2, m34 = m3 + m4, M = masses.total();
  const double x12 = (m1 * x[0] + m2 * x[1]) / m12;
  const double x34 = (m3 * x[2] + m4 * x[3]) / m34;
  return {std::sqrt(m1 * m2 / m12) * (x[0] - x[1]), std::sqrt(m3 * m4 / m34) * (x[2] - x[3]),
          std::sqrt(m12 * m34 / M) * (x12 - x34)};
}

std::array<Vec3, 3> sector_normals(const PlaneSet& planes, const Ordering& p) {
  if (!is_permutation_of_four(p)) fail(ErrorKind::InvalidArgument, "ordering must be a permutation of 1,2,3,4");
  std::array<double, 4> x{};
  for (int k = 0; k < 4; ++k) x[p[k] - 1] = static_cast<double>(k);
  const Vec3 inside = relative_coordinates(planes.masses(), x);
  std::array<Vec3, 3> n;
  for (int k = 0; k < 3; ++k) {
    const Vec3& g = planes.normal(p[k], p[k + 1]);
    n[k] = g.dot(inside) > 0.0 ? g : Vec3(-g);
  }
  return n;
}

SectorGeometry triangle_geometry(const std::array<Vec3, 3>& inward_normals) {
  SectorGeometry g;
  for (int k = 0; k < 3; ++k) {
    const double len = inward_normals[k].norm();
    if (!(len > 0.0) || !std::isfinite(len)) fail(ErrorKind::Geometry, "bounding normal has zero or non-finite length");
    g.bounding_normals[k] = inward_normals[k] / len;
  }
  const auto& n = g.bounding_normals;
  static constexpr int pairs[3][3] = {{0, 1, 2}, {1, 2, 0}, {0, 2, 1}};
  for (int k = 0; k < 3; ++k) {
    const auto [a, b, c] = pairs[k];
    Vec3 v = n[a].cross(n[b]);
    if (v.norm() < kDegenerate) fail(ErrorKind::Geometry, "two bounding planes are parallel");
    v.normalize();
    const double side = n[c].dot(v);
    if (std::abs(side) < kDegenerate) fail(ErrorKind::Geometry, "the three bounding planes share a line");
    g.vertices[k] = side > 0.0 ? v : Vec3(-v);
    g.dihedral_angles[k] = kPi - std::acos(clamp_unit(n[a].dot(n[b])));
  }
  const auto& w = g.dihedral_angles;
  g.area = w[0] + w[1] + w[2] - kPi;
  if (!(g.area > kDegenerate)) fail(ErrorKind::Geometry, "degenerate spherical triangle (non-positive area)");
  for (int k = 0; k < 3; ++k) {
    const double wa = w[k], wb = w[(k + 1) % 3], wc = w[(k + 2) % 3];
    g.vertex_angles[k] = std::acos(clamp_unit((std::cos(wa) + std::cos(wb) * std::cos(wc)) / (std::sin(wb) * std::sin(wc))));
  }
  g.perimeter = g.vertex_angles[0] + g.vertex_angles[1] + g.vertex_angles[2];
  return g;
}

SectorGeometry sector_geometry(const PlaneSet& planes, const Ordering& p) {
  SectorGeometry g = triangle_geometry(sector_normals(planes, p));
  g.ordering = p;
  return g;
}

std::vector<Ordering> all_orderings() {
  std::vector<Ordering> out;
  Ordering p{1, 2, 3, 4};
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

std::vector<Ordering> distinct_sectors(const MassSequence& masses, double tol) {
  if (masses.size() != 4) fail(ErrorKind::InvalidArgument, "sector enumeration is implemented for four particles");
  std::array<int, 4> cls{};
  std::vector<double> reps;
  for (int i = 0; i < 4; ++i) {
    int found = -1;
    for (std::size_t r = 0; r < reps.size(); ++r)
      if (std::abs(masses[i] - reps[r]) <= tol * std::max(masses[i], reps[r])) found = static_cast<int>(r);
    if (found < 0) {
      found = static_cast<int>(reps.size());
      reps.push_back(masses[i]);
    }
    cls[i] = found;
  }
  std::map<std::array<int, 4>, Ordering> seen;
  std::vector<Ordering> out;
  for (const auto& p : all_orderings()) {
    std::array<int, 4> fwd{}, rev{};
    for (int k = 0; k < 4; ++k) {
      fwd[k] = cls[p[k] - 1];
      rev[3 - k] = fwd[k];
    }
    const auto key = std::min(fwd, rev);
    if (seen.emplace(key, p).second) out.push_back(p);
  }
  return out;
}

std::string to_json(const SectorGeometry& g) {
  using nlohmann::json;
  auto vec = [](const Vec3& v) { return json::array({round12(v.x()), round12(v.y()), round12(v.z())}); };
  json j;
  j["ordering"] = std::vector<int>(g.ordering.begin(), g.ordering.end());
  j["normals"] = json::array({vec(g.bounding_normals[0]), vec(g.bounding_normals[1]), vec(g.bounding_normals[2])});
  j["vertices"] = json::array({vec(g.vertices[0]), vec(g.vertices[1]), vec(g.vertices[2])});
  j["dihedral_angles"] = json::array();
  j["vertex_angles"] = json::array();
  for (int k = 0; k < 3; ++k) {
    j["dihedral_angles"].push_back(round12(g.dihedral_angles[k]));
    j["vertex_angles"].push_back(round12(g.vertex_angles[k]));
  }
  j["area"] = round12(g.area);
  j["perimeter"] = round12(g.perimeter);
  return j.dump(2);
}

}  // namespace hcb
