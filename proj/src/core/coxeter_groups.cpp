#include "hcb/coxeter_groups.hpp"

#include <algorithm>
#include <cmath>

#include "hcb/jacobi_geometry.hpp"
#include "json.hpp"

namespace hcb {

namespace {

constexpr double kMatrixTol = 1e-9;
constexpr int kMaxOrder = 240;

Mat3 reflection(const Vec3& n) { return Mat3::Identity() - 2.0 * n * n.transpose(); }

Vec3 canonical_sign(Vec3 v) {
  for (int k = 0; k < 3; ++k) {
    if (std::abs(v[k]) > 1e-12) {
      if (v[k] < 0) v = -v;
      break;
    }
  }
  return v;
}

// Integer q with angle(n_i, n_j) = pi / q between the two planes, or 0.
int plane_angle_index(const Vec3& a, const Vec3& b) {
  const double theta = std::acos(std::min(1.0, std::abs(a.dot(b))));
  if (theta < 1e-6) return 0;
  const int q = static_cast<int>(std::lround(kPi / theta));
  return (q >= 2 && std::abs(theta - kPi / q) < 1e-8) ? q : 0;
}

CoxeterSpec identify(const std::array<Vec3, 3>& roots, long long order, int reflections) {
  const int q01 = plane_angle_index(roots[0], roots[1]);
  const int q12 = plane_angle_index(roots[1], roots[2]);
  const int q02 = plane_angle_index(roots[0], roots[2]);
  std::vector<int> bracket;
  if (q02 == 2 && q01 > 2 && q12 > 2) bracket = {q01, q12};
  if (!bracket.empty()) {
    std::vector<int> rev(bracket.rbegin(), bracket.rend());
    for (const auto& row : coxeter_table())
      if (row.rank == 3 && (row.bracket == bracket || row.bracket == rev)) return row;
  }
  CoxeterSpec custom;
  custom.name = "custom";
  custom.rank = 3;
  for (int q : {q01, q12, q02})
    if (q > 2) custom.bracket.push_back(q);
  custom.lambda0 = reflections;
  custom.order = order;
  return custom;
}

int element_order(const Mat3& m) {
  Mat3 p = m;
  for (int k = 1; k <= kMaxOrder; ++k) {
    if ((p - Mat3::Identity()).norm() < kMatrixTol) return k;
    p = p * m;
  }
  fail(ErrorKind::Numerical, "element order exceeds the closure bound");
}

}  // namespace

int ReflectionGroup::find(const Mat3& m) const {
  for (std::size_t i = 0; i < elements.size(); ++i)
    if ((elements[i].matrix - m).norm() < kMatrixTol) return static_cast<int>(i);
  return -1;
}

std::vector<Vec3> ReflectionGroup::reflection_normals() const {
  std::vector<Vec3> out;
  for (int idx : reflections) {
    // I - R = 2 n n^T; take the largest column.
    const Mat3 p = Mat3::Identity() - elements[idx].matrix;
    int best = 0;
    for (int k = 1; k < 3; ++k)
      if (p.col(k).norm() > p.col(best).norm()) best = k;
    out.push_back(canonical_sign(p.col(best).normalized()));
  }
  return out;
}

ReflectionGroup generate_group(const std::array<Vec3, 3>& simple_root_normals) {
  ReflectionGroup g;
  for (int k = 0; k < 3; ++k) {
    const double len = simple_root_normals[k].norm();
    if (std::abs(len - 1.0) > 1e-8) fail(ErrorKind::InvalidArgument, "simple roots must be unit vectors");
    g.simple_roots[k] = simple_root_normals[k] / len;
  }
  const std::array<Mat3, 3> gens{reflection(g.simple_roots[0]), reflection(g.simple_roots[1]), reflection(g.simple_roots[2])};

  g.elements.push_back(OrthogonalElement{});
  for (std::size_t i = 0; i < g.elements.size(); ++i) {
    for (int k = 0; k < 3; ++k) {
      const Mat3 m = gens[k] * g.elements[i].matrix;
      if (g.find(m) >= 0) continue;
      if (static_cast<int>(g.elements.size()) >= kMaxOrder)
        fail(ErrorKind::InvalidArgument, "closure exceeds " + std::to_string(kMaxOrder) +
                                             " elements: the roots do not generate a finite Coxeter group");
      OrthogonalElement e;
      e.matrix = m;
      e.parent = static_cast<int>(i);
      e.generator = k;
      g.elements.push_back(e);
    }
  }

  for (std::size_t i = 0; i < g.elements.size(); ++i) {
    auto& e = g.elements[i];
    e.det = e.matrix.determinant() > 0 ? 1 : -1;
    e.parity = e.det;
    const double tr = e.matrix.trace();
    const double c = e.det > 0 ? (tr - 1.0) / 2.0 : (tr + 1.0) / 2.0;
    e.rotation_angle = std::acos(std::clamp(c, -1.0, 1.0));
    e.order = element_order(e.matrix);
    if (e.det < 0 && std::abs(tr - 1.0) < 1e-9) g.reflections.push_back(static_cast<int>(i));
  }
  g.spec = identify(g.simple_roots, g.order(), static_cast<int>(g.reflections.size()));
  if (g.spec.name != "custom" &&
      (g.spec.order != g.order() || g.spec.lambda0 != static_cast<int>(g.reflections.size())))
    fail(ErrorKind::Consistency, "closure of " + g.spec.name + " roots gave " + std::to_string(g.order()) +
                                     " elements and " + std::to_string(g.reflections.size()) + " reflections");
  g.classes = conjugacy_classes(g);
  g.class_of.assign(g.elements.size(), -1);
  for (std::size_t c = 0; c < g.classes.size(); ++c)
    for (int idx : g.classes[c].members) g.class_of[idx] = static_cast<int>(c);
  return g;
}

ReflectionGroup group_from_masses(const MassSequence& masses) {
  const auto planes = coincidence_normals(masses);
  return generate_group({planes.normal(1, 2), planes.normal(2, 3), planes.normal(3, 4)});
}

MassSequence standard_masses(const CoxeterSpec& spec) {
  if (spec.name == "A3") return MassSequence({1, 1, 1, 1});
  if (spec.name == "C3") return MassSequence({3, 1, 2, 6});
  if (spec.name == "H3") {
    const auto r = symmetric_ratio(spec);
    if (!r) fail(ErrorKind::Numerical, "H3 family has no symmetric member");
    return generate_family(spec, 1.0, *r);
  }
  fail(ErrorKind::Unsupported, "group algebra is implemented for A3, C3 and H3, not " + spec.name);
}

ReflectionGroup coxeter_group(const CoxeterSpec& spec) { return group_from_masses(standard_masses(spec)); }

std::vector<ConjugacyClass> conjugacy_classes(const ReflectionGroup& group) {
  const std::size_t n = group.elements.size();
  std::vector<int> assigned(n, -1);
  std::vector<ConjugacyClass> classes;
  for (std::size_t i = 0; i < n; ++i) {
    if (assigned[i] >= 0) continue;
    ConjugacyClass c;
    const Mat3& x = group.elements[i].matrix;
    for (const auto& h : group.elements) {
      const int j = group.find(h.matrix * x * h.matrix.transpose());
      if (j < 0) fail(ErrorKind::Consistency, "group is not closed under conjugation");
      if (assigned[j] < 0) {
        assigned[j] = static_cast<int>(classes.size());
        c.members.push_back(j);
      }
    }
    std::sort(c.members.begin(), c.members.end());
    const auto& e = group.elements[i];
    c.angle = e.rotation_angle;
    c.parity = e.parity;
    c.element_order = e.order;
    c.size = static_cast<int>(c.members.size());
    classes.push_back(std::move(c));
  }
  std::stable_sort(classes.begin(), classes.end(), [](const ConjugacyClass& a, const ConjugacyClass& b) {
    if (a.parity != b.parity) return a.parity > b.parity;
    if (a.element_order != b.element_order) return a.element_order < b.element_order;
    return a.angle < b.angle;
  });
  return classes;
}

double o3_character(int lambda, double angle, int parity) {
  if (lambda < 0) fail(ErrorKind::InvalidArgument, "lambda must be non-negative");
  double s = 0.0;
  for (int mu = -lambda; mu <= lambda; ++mu) s += std::cos(mu * angle) * (((lambda - mu) % 2 != 0 && parity < 0) ? -1.0 : 1.0);
  return s;
}

double o3_character(int lambda, const ConjugacyClass& cls) { return o3_character(lambda, cls.angle, cls.parity); }

int degeneracy(int lambda, const ReflectionGroup& group) {
  double s = 0.0;
  for (const auto& c : group.classes) s += c.size * c.parity * o3_character(lambda, c);
  s /= static_cast<double>(group.order());
  const double r = std::round(s);
  if (std::abs(s - r) > 1e-6 || r < 0)
    fail(ErrorKind::Consistency, "anti-invariant multiplicity " + std::to_string(s) + " at lambda " +
                                     std::to_string(lambda) + " is not a non-negative integer");
  return static_cast<int>(r);
}

std::pair<int, int> lambda_steps(const CoxeterSpec& spec) {
  if (spec.name == "A3") return {3, 4};
  if (spec.name == "C3") return {4, 6};
  if (spec.name == "H3") return {6, 10};
  fail(ErrorKind::Unsupported, "lambda ladder is defined for A3, C3 and H3, not " + spec.name);
}

std::map<int, int> lambda_spectrum(const CoxeterSpec& spec, int lambda_max) {
  const auto [a, b] = lambda_steps(spec);
  std::map<int, int> out;
  for (int n1 = 0; spec.lambda0 + a * n1 <= lambda_max; ++n1)
    for (int n2 = 0; spec.lambda0 + a * n1 + b * n2 <= lambda_max; ++n2) ++out[spec.lambda0 + a * n1 + b * n2];
  return out;
}

std::vector<Vec3> rotation_axes(const ReflectionGroup& group, int order) {
  std::vector<Vec3> axes;
  for (const auto& e : group.elements) {
    if (e.det != 1 || e.order != order) continue;
    const Mat3& m = e.matrix;
    Vec3 axis(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
    if (axis.norm() < 1e-9) continue;
    axis = canonical_sign(axis.normalized());
    bool seen = false;
    for (const auto& a : axes) seen = seen || std::abs(std::abs(a.dot(axis)) - 1.0) < 1e-9;
    if (!seen) axes.push_back(axis);
  }
  return axes;
}

std::vector<HomogeneousPolynomial> invariant_polynomials(const ReflectionGroup& group) {
  int fold = 0;
  std::vector<int> degrees;
  if (group.spec.name == "H3") {
    fold = 5;
    degrees = {2, 6, 10};
  } else if (group.spec.name == "C3") {
    fold = 4;
    degrees = {2, 4, 6};
  } else if (group.spec.name == "A3") {
    fold = 3;
    degrees = {2, 3, 4};
  } else {
    fail(ErrorKind::Unsupported, "invariant polynomials are built for A3, C3 and H3");
  }
  const auto axes = rotation_axes(group, fold);
  if (axes.empty()) fail(ErrorKind::Unsupported, "no " + std::to_string(fold) + "-fold rotations found");

  // Orbit of one axis, identified up to sign.
  std::vector<Vec3> orbit;
  for (const auto& e : group.elements) {
    const Vec3 v = e.matrix * axes.front();
    bool seen = false;
    for (const auto& o : orbit) seen = seen || std::abs(std::abs(o.dot(v)) - 1.0) < 1e-9;
    if (!seen) orbit.push_back(v);
  }

  std::vector<HomogeneousPolynomial> out;
  for (int m : degrees) {
    HomogeneousPolynomial q(m);
    for (const auto& s : orbit) {
      HomogeneousPolynomial p = HomogeneousPolynomial::constant(1.0);
      for (int k = 0; k < m; ++k) p = p.times_linear(s);
      q += p;
    }
    out.push_back(std::move(q));
  }
  return out;
}

std::string to_json(const ReflectionGroup& group) {
  using nlohmann::json;
  json j;
  j["name"] = group.spec.name;
  j["bracket"] = group.spec.bracket;
  j["order"] = group.order();
  j["reflections"] = group.reflections.size();
  j["simple_roots"] = json::array();
  for (const auto& r : group.simple_roots) j["simple_roots"].push_back({round12(r.x()), round12(r.y()), round12(r.z())});
  j["classes"] = json::array();
  for (const auto& c : group.classes)
    j["classes"].push_back({{"angle", round12(c.angle)}, {"parity", c.parity}, {"order", c.element_order}, {"size", c.size}});
  return j.dump(2);
}

}  // namespace hcb
