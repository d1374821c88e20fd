#pragma once

#include <array>
#include <string>
#include <vector>

#include "hcb/common.hpp"
#include "hcb/mass_families.hpp"

namespace hcb {

/// Unit normals of the six coincidence planes x_i = x_j in the H-type frame:
/// z1 along the (12) relative vector, z2 along (34), z3 between the pair
/// centers of mass.
class PlaneSet {
 public:
  PlaneSet() = default;
  PlaneSet(const MassSequence& masses, std::array<Vec3, 6> normals);

  /// Normal of Z_ij for 1 <= i, j <= 4, i != j; symmetric in (i, j).
  const Vec3& normal(int i, int j) const;
  const MassSequence& masses() const noexcept { return masses_; }

  /// Slot of the pair (i, j) in normals(): 12, 13, 14, 23, 24, 34.
  static int slot(int i, int j);
  const std::array<Vec3, 6>& normals() const noexcept { return normals_; }

 private:
  MassSequence masses_;
  std::array<Vec3, 6> normals_;
};

/// Requires exactly four masses.
PlaneSet coincidence_normals(const MassSequence& masses);

/// Relative coordinates z = J S x of a four-particle configuration. For i < j
/// the difference x_i - x_j is a positive multiple of normal(i, j) . z for the
/// pairs 12, 34, 13, 14 and a negative multiple for 23, 24.
Vec3 relative_coordinates(const MassSequence& masses, const std::array<double, 4>& x);

/// A spherical triangle cut out by three great circles. Planes are ordered
/// (P1, P2, P3); the dihedral angles are (P1,P2), (P2,P3), (P1,P3) and
/// vertex_angles[k] is the arc length of the side opposite dihedral_angles[k].
struct SectorGeometry {
  Ordering ordering{1, 2, 3, 4};
  std::array<Vec3, 3> bounding_normals;  // inward unit normals
  std::array<Vec3, 3> vertices;          // P1^P2, P2^P3, P1^P3
  std::array<double, 3> dihedral_angles{};
  std::array<double, 3> vertex_angles{};
  double area = 0.0;
  double perimeter = 0.0;
};

/// Ordering sector x_{p1} < x_{p2} < x_{p3} < x_{p4}, bounded by Z_{p1p2},
/// Z_{p2p3} and Z_{p3p4}. Normals are oriented by a configuration inside the sector.
SectorGeometry sector_geometry(const PlaneSet& planes, const Ordering& p);

/// Triangle {z : n_k . z > 0} for three inward normals (not necessarily unit).
/// Throws ErrorKind::Geometry when the triangle is degenerate or empty.
SectorGeometry triangle_geometry(const std::array<Vec3, 3>& inward_normals);

/// The three coincidence-plane orientations: (p1,p2,p3,p4) -> the inward normals.
std::array<Vec3, 3> sector_normals(const PlaneSet& planes, const Ordering& p);

/// One representative ordering per congruence class. Orderings are identified
/// when their mass sequences agree up to reversal (inversion congruence),
/// masses compared with relative tolerance `tol`.
std::vector<Ordering> distinct_sectors(const MassSequence& masses, double tol = 1e-9);

/// All 24 orderings in lexicographic order.
std::vector<Ordering> all_orderings();

std::string to_json(const SectorGeometry& g);

}  // namespace hcb
