#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "hcb/jacobi_geometry.hpp"

using namespace hcb;

namespace {

MassSequence random_masses(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  return MassSequence({std::exp(u(rng)), std::exp(u(rng)), std::exp(u(rng)), std::exp(u(rng))});
}

double arc(const Vec3& a, const Vec3& b) { return std::acos(std::clamp(a.dot(b), -1.0, 1.0)); }

}  // namespace

TEST_CASE("frame convention and unit normals") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto planes = coincidence_normals(random_masses(rng));
    for (const auto& n : planes.normals()) CHECK(std::abs(n.norm() - 1.0) < 1e-12);
    CHECK(planes.normal(1, 2) == Vec3(1, 0, 0));
    CHECK(planes.normal(3, 4) == Vec3(0, 1, 0));
    CHECK(std::abs(planes.normal(1, 2).dot(planes.normal(3, 4))) < 1e-15);
    CHECK(std::abs(planes.normal(1, 3).dot(planes.normal(2, 4))) < 1e-12);
    CHECK(std::abs(planes.normal(1, 4).dot(planes.normal(2, 3))) < 1e-12);
    CHECK(planes.normal(1, 3).z() > 0);
    CHECK(planes.normal(1, 4).z() > 0);
    CHECK(planes.normal(2, 3).z() < 0);
    CHECK(planes.normal(2, 4).z() < 0);
  }
  const auto eq = coincidence_normals(MassSequence({1, 1, 1, 1}));
  // Substituting m_i = 1 into the Z_13 equation gives (1/sqrt2, -1/sqrt2, 1).
  const Vec3 want = Vec3(1, -1, std::sqrt(2.0)) / 2.0;
  CHECK((eq.normal(1, 3) - want).norm() < 1e-15);
  CHECK(std::abs(eq.normal(1, 3).dot(eq.normal(2, 4))) < 1e-15);
  CHECK(eq.normal(1, 3).dot(eq.normal(1, 2)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(coincidence_normals(MassSequence({1, 1, 1})), Error);
}

TEST_CASE("normals annihilate coincident configurations and fix the pair sign") {
  std::mt19937 rng(5);
  std::normal_distribution<double> g;
  const int sigma[4][4] = {{0, 1, 1, 1}, {0, 0, -1, -1}, {0, 0, 0, 1}, {0, 0, 0, 0}};
  for (int trial = 0; trial < 100; ++trial) {
    const auto masses = random_masses(rng);
    const auto planes = coincidence_normals(masses);
    for (int i = 1; i <= 4; ++i)
      for (int j = i + 1; j <= 4; ++j) {
        std::array<double, 4> x{g(rng), g(rng), g(rng), g(rng)};
        x[j - 1] = x[i - 1];
        CHECK(std::abs(planes.normal(i, j).dot(relative_coordinates(masses, x))) < 1e-12);
        x[i - 1] += 1.0;
        CHECK(sigma[i - 1][j - 1] * planes.normal(i, j).dot(relative_coordinates(masses, x)) > 0.0);
      }
  }
}

TEST_CASE("dihedral angles agree with the kaleidoscope angle") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto masses = random_masses(rng);
    const auto planes = coincidence_normals(masses);
    const double c = std::abs(planes.normal(1, 2).dot(planes.normal(2, 3)));
    CHECK(std::acos(c) == doctest::Approx(sector_angle(masses[0], masses[1], masses[2])).epsilon(1e-11));
    for (const auto& p : all_orderings()) {
      const auto g = sector_geometry(planes, p);
      const double w1 = sector_angle(masses[p[0] - 1], masses[p[1] - 1], masses[p[2] - 1]);
      const double w2 = sector_angle(masses[p[1] - 1], masses[p[2] - 1], masses[p[3] - 1]);
      CHECK(g.dihedral_angles[0] == doctest::Approx(w1).epsilon(1e-11));
      CHECK(g.dihedral_angles[1] == doctest::Approx(w2).epsilon(1e-11));
      CHECK(g.dihedral_angles[2] == doctest::Approx(kPi / 2).epsilon(1e-11));
      CHECK(g.area == doctest::Approx(w1 + w2 - kPi / 2).epsilon(1e-11));
      for (int k = 0; k < 3; ++k) {
        CHECK(g.vertex_angles[k] > 0.0);
        CHECK(g.vertex_angles[k] < kPi);
      }
      // side k lies opposite dihedral angle k
      CHECK(g.vertex_angles[0] == doctest::Approx(arc(g.vertices[1], g.vertices[2])).epsilon(1e-9));
      CHECK(g.vertex_angles[1] == doctest::Approx(arc(g.vertices[0], g.vertices[2])).epsilon(1e-9));
      CHECK(g.vertex_angles[2] == doctest::Approx(arc(g.vertices[0], g.vertices[1])).epsilon(1e-9));
      const auto r = sector_geometry(planes, reversed(p));
      CHECK(r.area == doctest::Approx(g.area).epsilon(1e-12));
      auto a = g.dihedral_angles, b = r.dihedral_angles;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      for (int k = 0; k < 3; ++k) CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("sectors tile the sphere") {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto planes = coincidence_normals(random_masses(rng));
    double total = 0.0;
    for (const auto& p : all_orderings()) total += sector_geometry(planes, p).area;
    CHECK(total == doctest::Approx(4 * kPi).epsilon(1e-12));
    // Around the line x1 = x2 = x3 with x4 above, six sectors meet.
    double around = 0.0;
    std::array<int, 3> s{1, 2, 3};
    do around += sector_geometry(planes, {s[0], s[1], s[2], 4}).dihedral_angles[0];
    while (std::next_permutation(s.begin(), s.end()));
    CHECK(around == doctest::Approx(2 * kPi).epsilon(1e-12));
  }
}

TEST_CASE("Coxeter sectors") {
  const auto a3 = sector_geometry(coincidence_normals(MassSequence({1, 1, 1, 1})), {1, 2, 3, 4});
  CHECK(a3.dihedral_angles[0] == doctest::Approx(kPi / 3));
  CHECK(a3.dihedral_angles[1] == doctest::Approx(kPi / 3));
  CHECK(a3.area == doctest::Approx(kPi / 6).epsilon(1e-13));
  for (const auto& name : {"A3", "C3", "H3"}) {
    const auto spec = coxeter_spec(name);
    for (double r : default_ratio_grid(spec, 20)) {
      const auto g = sector_geometry(coincidence_normals(generate_family(spec, 1.0, r)), {1, 2, 3, 4});
      CHECK(std::abs(spec.order * g.area - 4 * kPi) < 1e-10);
    }
  }
  const auto c3 = sector_geometry(coincidence_normals(MassSequence({3, 1, 2, 6})), {1, 2, 3, 4});
  CHECK(c3.area == doctest::Approx(kPi / 12).epsilon(1e-13));
}

TEST_CASE("manual triangles") {
  const auto oct = triangle_geometry({Vec3(1, 0, 0), Vec3(0, 2, 0), Vec3(0, 0, 1)});
  CHECK(oct.area == doctest::Approx(kPi / 2).epsilon(1e-14));
  CHECK(oct.perimeter == doctest::Approx(3 * kPi / 2).epsilon(1e-14));
  CHECK_THROWS_AS(triangle_geometry({Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(1, 1, 0)}), Error);
  CHECK_THROWS_AS(triangle_geometry({Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(0, 0, 1)}), Error);
  CHECK_THROWS_AS(triangle_geometry({Vec3(1, 0, 0), Vec3(0, 0, 0), Vec3(0, 0, 1)}), Error);
}

TEST_CASE("distinct sector counts") {
  CHECK(distinct_sectors(MassSequence({1, 1, 1, 1})).size() == 1);
  CHECK(distinct_sectors(MassSequence({3, 1, 2, 6})).size() == 12);
  const auto h3 = distinct_sectors(MassSequence({0.44279, 0.03381, 0.08061, 0.44279}));
  CHECK(h3.size() == 6);
  CHECK(h3.front() == Ordering{1, 2, 3, 4});
}

TEST_CASE("geometry json") {
  const auto g = sector_geometry(coincidence_normals(MassSequence({1, 1, 1, 1})), {1, 2, 3, 4});
  const std::string j = to_json(g);
  CHECK(j.find("\"area\": 0.523598775598") != std::string::npos);
  CHECK(j.find("\"perimeter\"") != std::string::npos);
}
