#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "hcb/common.hpp"
#include "hcb/mass_families.hpp"
#include "hcb/polynomial.hpp"

namespace hcb {

struct OrthogonalElement {
  Mat3 matrix = Mat3::Identity();
  int det = 1;
  double rotation_angle = 0.0;  // [0, pi]
  int parity = 1;               // equals det
  int order = 1;
  // Word tree: matrix = generator_matrix * elements[parent].matrix.
  int parent = -1;
  int generator = -1;
};

struct ConjugacyClass {
  double angle = 0.0;
  int parity = 1;
  int size = 0;
  int element_order = 1;
  std::vector<int> members;  // indices into ReflectionGroup::elements
};

struct ReflectionGroup {
  CoxeterSpec spec;
  std::array<Vec3, 3> simple_roots;
  std::vector<OrthogonalElement> elements;  // elements[0] is the identity
  std::vector<int> reflections;             // indices of det -1, trace +1 elements
  std::vector<ConjugacyClass> classes;
  std::vector<int> class_of;                // element index -> class index

  long long order() const noexcept { return static_cast<long long>(elements.size()); }
  /// Index of the element equal to m within the Frobenius tolerance, or -1.
  int find(const Mat3& m) const;
  /// Unit normal of each reflection, sign fixed so that its first non-zero component is positive.
  std::vector<Vec3> reflection_normals() const;
};

/// Closure of the reflections in the three simple roots. The group is labeled
/// with its Table row when the pairwise root angles match a bracket, otherwise
/// as "custom" (e.g. three orthogonal planes). Throws ErrorKind::InvalidArgument
/// when closure exceeds 240 elements.
ReflectionGroup generate_group(const std::array<Vec3, 3>& simple_root_normals);

/// Roots are the coincidence normals of Z12, Z23, Z34 for the given masses.
ReflectionGroup group_from_masses(const MassSequence& masses);

/// Representative masses for a rank-3 row: equal masses for A3, (3,1,2,6) for
/// C3 and the symmetric member (m1 = m4) for H3.
MassSequence standard_masses(const CoxeterSpec& spec);
ReflectionGroup coxeter_group(const CoxeterSpec& spec);

std::vector<ConjugacyClass> conjugacy_classes(const ReflectionGroup& group);

/// O(3) character of the degree-lambda irrep on a class with rotation angle phi and parity.
double o3_character(int lambda, double angle, int parity);
double o3_character(int lambda, const ConjugacyClass& cls);

/// Multiplicity of the anti-invariant irrep inside the degree-lambda harmonics.
/// Throws ErrorKind::Consistency if the character sum is not an integer within 1e-6.
int degeneracy(int lambda, const ReflectionGroup& group);

/// Steps (a, b) of the lambda ladder lambda0 + a n1 + b n2 for A3, C3, H3.
std::pair<int, int> lambda_steps(const CoxeterSpec& spec);

/// lambda -> number of (n1, n2) with lambda0 + a n1 + b n2 = lambda, up to lambda_max.
std::map<int, int> lambda_spectrum(const CoxeterSpec& spec, int lambda_max);

/// Axis power sums q_m(z) = sum over axes s of (s . z)^m, axes deduplicated up
/// to sign. H3 uses the 5-fold axes (m = 2, 6, 10), C3 the 4-fold axes
/// (m = 2, 4, 6), A3 the 3-fold axes (m = 2, 3, 4).
std::vector<HomogeneousPolynomial> invariant_polynomials(const ReflectionGroup& group);

/// Rotation axes of the proper elements of the given order, one per line.
std::vector<Vec3> rotation_axes(const ReflectionGroup& group, int element_order);

std::string to_json(const ReflectionGroup& group);

}  // namespace hcb
