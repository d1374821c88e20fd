#include <algorithm>
#include <cmath>
#include <random>
#include <tuple>

#include "doctest.h"
#include "hcb/coxeter_groups.hpp"

using namespace hcb;

namespace {

// Count (n1, n2) >= 0 with lambda0 + a n1 + b n2 = lambda by nested loops.
int brute_count(int lambda0, int a, int b, int lambda) {
  int count = 0;
  for (int n1 = 0; n1 <= 100; ++n1)
    for (int n2 = 0; n2 <= 100; ++n2) count += (lambda0 + a * n1 + b * n2 == lambda);
  return count;
}

}  // namespace

TEST_CASE("group orders and reflection counts") {
  for (const auto& [name, order, refl] : std::vector<std::tuple<std::string, int, int>>{{"A3", 24, 6}, {"C3", 48, 9}, {"H3", 120, 15}}) {
    const auto g = coxeter_group(coxeter_spec(name));
    CHECK(g.spec.name == name);
    CHECK(g.order() == order);
    CHECK(g.reflections.size() == static_cast<std::size_t>(refl));
    CHECK((g.elements[0].matrix - Mat3::Identity()).norm() == 0.0);
    int count_reflections = 0;
    for (std::size_t i = 0; i < g.elements.size(); ++i) {
      const auto& e = g.elements[i];
      CHECK((e.matrix.transpose() * e.matrix - Mat3::Identity()).norm() < 1e-12);
      CHECK(e.parity == e.det);
      CHECK(g.find(e.matrix.transpose()) >= 0);
      const bool is_reflection = e.det == -1 && std::abs(e.matrix.trace() - 1.0) < 1e-9;
      count_reflections += is_reflection;
      if (e.parent >= 0) {
        const Vec3& n = g.simple_roots[e.generator];
        const Mat3 r = Mat3::Identity() - 2 * n * n.transpose();
        CHECK((r * g.elements[e.parent].matrix - e.matrix).norm() < 1e-12);
      }
    }
    CHECK(count_reflections == refl);
    // closure
    for (std::size_t i = 0; i < g.elements.size(); i += 7)
      for (std::size_t j = 0; j < g.elements.size(); ++j) CHECK(g.find(g.elements[i].matrix * g.elements[j].matrix) >= 0);
    // generator relations: (R12 R34)^2 = (R34 R23)^3 = (R23 R12)^q = 1
    std::array<Mat3, 3> r;
    for (int k = 0; k < 3; ++k) r[k] = Mat3::Identity() - 2 * g.simple_roots[k] * g.simple_roots[k].transpose();
    const int q = g.spec.bracket[0];
    Mat3 p02 = r[0] * r[2], p21 = r[2] * r[1], p10 = r[1] * r[0];
    CHECK((p02 * p02 - Mat3::Identity()).norm() < 1e-12);
    CHECK((p21 * p21 * p21 - Mat3::Identity()).norm() < 1e-12);
    Mat3 acc = Mat3::Identity();
    for (int k = 0; k < q; ++k) acc = acc * p10;
    CHECK((acc - Mat3::Identity()).norm() < 1e-12);
    // classes partition the group
    int total = 0;
    for (const auto& c : g.classes) total += c.size;
    CHECK(total == order);
    // character orthogonality for the anti-invariant irrep
    double s = 0.0;
    for (const auto& c : g.classes) s += c.size * 1.0;
    CHECK(s / order == doctest::Approx(1.0));
  }
}

TEST_CASE("H3 conjugacy classes") {
  const auto g = coxeter_group(coxeter_spec("H3"));
  REQUIRE(g.classes.size() == 10);
  struct Row {
    double angle;
    int parity, order, size;
  };
  const std::vector<Row> table{{0, 1, 1, 1},           {2 * kPi / 5, 1, 5, 12}, {4 * kPi / 5, 1, 5, 12}, {2 * kPi / 3, 1, 3, 20},
                               {kPi, 1, 2, 15},        {kPi, -1, 2, 1},         {kPi / 5, -1, 10, 12},   {3 * kPi / 5, -1, 10, 12},
                               {kPi / 3, -1, 6, 20},   {0, -1, 2, 15}};
  std::vector<bool> used(10, false);
  for (const auto& row : table) {
    int hits = 0;
    for (std::size_t c = 0; c < 10; ++c) {
      const auto& k = g.classes[c];
      if (!used[c] && std::abs(k.angle - row.angle) < 1e-9 && k.parity == row.parity && k.element_order == row.order &&
          k.size == row.size) {
        used[c] = true;
        ++hits;
        break;
      }
    }
    CHECK(hits == 1);
  }
  const auto a3 = coxeter_group(coxeter_spec("A3"));
  CHECK(a3.classes.front().size == 1);
  CHECK(a3.classes.front().angle == 0.0);
  CHECK(a3.classes.front().parity == 1);
}

TEST_CASE("O(3) characters") {
  for (int l = 0; l <= 20; ++l) {
    CHECK(o3_character(l, 0.0, -1) == doctest::Approx(1.0));
    CHECK(o3_character(l, 0.0, 1) == doctest::Approx(2 * l + 1));
    CHECK(o3_character(l, kPi, -1) == doctest::Approx((2 * l + 1) * ((l % 2) ? -1.0 : 1.0)));
    for (double phi : {0.3, 1.1, 2 * kPi / 5, 2.9})
      CHECK(o3_character(l, phi, 1) == doctest::Approx(std::sin((l + 0.5) * phi) / std::sin(phi / 2)).epsilon(1e-12));
  }
  CHECK(o3_character(1, 0.0, 1) == doctest::Approx(3.0));
  CHECK(o3_character(1, kPi, -1) == doctest::Approx(-3.0));
}

TEST_CASE("degeneracy matches the lambda ladder") {
  for (const auto& name : {"A3", "C3", "H3"}) {
    const auto spec = coxeter_spec(name);
    const auto g = coxeter_group(spec);
    const auto [a, b] = lambda_steps(spec);
    const auto ladder = lambda_spectrum(spec, 60);
    for (int l = 0; l <= 60; ++l) {
      const int brute = brute_count(spec.lambda0, a, b, l);
      CHECK(degeneracy(l, g) == brute);
      CHECK((ladder.count(l) ? ladder.at(l) : 0) == brute);
    }
  }
  const auto h3 = coxeter_group(coxeter_spec("H3"));
  CHECK(degeneracy(15, h3) == 1);
  CHECK(degeneracy(45, h3) == 2);
  CHECK(degeneracy(14, h3) == 0);
  CHECK(lambda_spectrum(coxeter_spec("H3"), 35) == std::map<int, int>{{15, 1}, {21, 1}, {25, 1}, {27, 1}, {31, 1}, {33, 1}, {35, 1}});
  CHECK(lambda_spectrum(coxeter_spec("A3"), 14) == std::map<int, int>{{6, 1}, {9, 1}, {10, 1}, {12, 1}, {13, 1}, {14, 1}});
  CHECK(lambda_spectrum(coxeter_spec("C3"), 9) == std::map<int, int>{{9, 1}});
}

TEST_CASE("group from arbitrary family members and orthogonal roots") {
  for (const auto& name : {"A3", "C3", "H3"}) {
    const auto spec = coxeter_spec(name);
    for (double r : default_ratio_grid(spec, 5)) {
      const auto g = group_from_masses(generate_family(spec, 1.0, r));
      CHECK(g.spec.name == name);
      CHECK(g.order() == spec.order);
    }
  }
  const auto oct = generate_group({Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)});
  CHECK(oct.spec.name == "custom");
  CHECK(oct.order() == 8);
  CHECK(oct.reflections.size() == 3);
  // (Z2)^3 anti-invariants among degree-l harmonics: (l-1)/2 for odd l, none for even l.
  for (int l = 0; l <= 30; ++l) CHECK(degeneracy(l, oct) == ((l % 2) ? (l - 1) / 2 : 0));
  // irrational plane angle: closure never terminates
  const Vec3 n2 = Vec3(std::cos(1.0), std::sin(1.0), 0);
  CHECK_THROWS_AS(generate_group({Vec3(1, 0, 0), n2, Vec3(0, 0, 1)}), Error);
  CHECK_THROWS_AS(generate_group({Vec3(2, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)}), Error);
  CHECK_THROWS_AS(coxeter_group(coxeter_spec("A4")), Error);
}

TEST_CASE("invariant polynomials") {
  for (const auto& name : {"A3", "C3", "H3"}) {
    const auto g = coxeter_group(coxeter_spec(name));
    const auto qs = invariant_polynomials(g);
    REQUIRE(qs.size() == 3);
    for (const auto& q : qs) {
      const double scale = q.max_abs_coefficient();
      CHECK(scale > 0);
      for (const auto& e : g.elements) CHECK((q.compose(e.matrix) - q).max_abs_coefficient() < 1e-10 * scale);
    }
    // q2 is a multiple of |z|^2
    const auto& q2 = qs[0];
    const double c = q2.coefficient(2, 0, 0);
    CHECK((q2 - radius_power(1) * c).max_abs_coefficient() < 1e-12 * c);
  }
  const auto h3 = coxeter_group(coxeter_spec("H3"));
  CHECK(rotation_axes(h3, 5).size() == 6);
  const auto qs = invariant_polynomials(h3);
  CHECK(qs[1].degree() == 6);
  CHECK(qs[2].degree() == 10);
  const auto cube = qs[0] * qs[0] * qs[0];
  const double ratio = qs[1].coefficient(6, 0, 0) / cube.coefficient(6, 0, 0);
  CHECK((qs[1] - cube * ratio).max_abs_coefficient() > 1e-3 * qs[1].max_abs_coefficient());
  CHECK_THROWS_AS(invariant_polynomials(generate_group({Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)})), Error);
}

TEST_CASE("group json") {
  const auto j = to_json(coxeter_group(coxeter_spec("C3")));
  CHECK(j.find("\"order\": 48") != std::string::npos);
  CHECK(j.find("\"reflections\": 9") != std::string::npos);
}
