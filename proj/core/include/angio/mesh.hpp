#pragma once

#include "angio/common.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace angio {

/// Precomputed affine data of one tetrahedron.
struct TetGeometry {
  double volume = 0.0;
  /// Gradients of the four barycentric coordinates (constant on the element).
  std::array<Vec3, 4> grad;
  /// Maps x - x0 to (lambda1, lambda2, lambda3).
  Eigen::Matrix3d inverse_jacobian;
  Vec3 origin;
};

struct PointLocation {
  int tet = -1;
  std::array<double, 4> bary{};
};

/// Conforming tetrahedral partition of the tissue domain with a P1 nodal basis.
///
/// Construction validates orientation (strictly positive signed volume),
/// node index ranges and the absence of dangling nodes, then extracts the
/// boundary faces. All lengths are in mm.
class TetMesh {
 public:
  TetMesh(std::vector<Vec3> nodes, std::vector<std::array<int, 4>> tets);

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_tets() const { return static_cast<int>(tets_.size()); }

  const std::vector<Vec3>& nodes() const { return nodes_; }
  const std::vector<std::array<int, 4>>& tets() const { return tets_; }
  const std::vector<std::array<int, 3>>& boundary_faces() const { return boundary_faces_; }
  const TetGeometry& geometry(int tet) const { return geometry_[static_cast<std::size_t>(tet)]; }

  double total_volume() const { return total_volume_; }
  const Vec3& bbox_min() const { return bbox_min_; }
  const Vec3& bbox_max() const { return bbox_max_; }
  double diameter() const { return (bbox_max_ - bbox_min_).norm(); }

  /// Barycentric coordinates of x with respect to a given tet (unclipped).
  std::array<double, 4> barycentric(int tet, const Vec3& x) const;

  /// Tet containing x, or nullopt when x lies outside the mesh by more than
  /// tol (absolute, mm).
  std::optional<PointLocation> find(const Vec3& x, double tol) const;

  /// Candidate tets whose bounding boxes overlap the box [lo, hi].
  std::vector<int> candidates(const Vec3& lo, const Vec3& hi) const;

  /// Value of a P1 field at x, located with the default tolerance.
  double evaluate(const NodalField& field, const Vec3& x) const;

  /// Per-tet gradient of a P1 field.
  Vec3 gradient(const NodalField& field, int tet) const;

 private:
  void build_geometry();
  void build_boundary();
  void build_bins();
  std::array<int, 3> bin_of(const Vec3& x) const;

  std::vector<Vec3> nodes_;
  std::vector<std::array<int, 4>> tets_;
  std::vector<std::array<int, 3>> boundary_faces_;
  std::vector<TetGeometry> geometry_;
  double total_volume_ = 0.0;
  Vec3 bbox_min_ = Vec3::Zero();
  Vec3 bbox_max_ = Vec3::Zero();

  std::array<int, 3> bin_count_{1, 1, 1};
  Vec3 bin_size_ = Vec3::Ones();
  std::vector<std::vector<int>> bins_;
};

/// Reads the ASCII mesh format: "N_nodes N_tets", node lines "x y z",
/// tet lines "i j k l" with 0-based indices.
TetMesh load_mesh(const std::filesystem::path& path);

void save_mesh(const std::filesystem::path& path, const TetMesh& mesh);

/// Structured cube [0, edge]^3 with `cells` hexahedra per side, each split
/// into 6 positively oriented tets sharing the main diagonal.
TetMesh make_cube_mesh(int cells, double edge);

/// Default absolute location tolerance for a mesh, 1e-10 * diam.
double location_tolerance(const TetMesh& mesh);

/// locate_point: tet and barycentric coordinates of x; throws InputError
/// when x is outside the domain.
PointLocation locate_point(const TetMesh& mesh, const Vec3& x);

/// Entry (l, j) = int w eta_j eta_l dx with w interpolated as a P1 function.
LinearOperator assemble_weighted_mass(const TetMesh& mesh, const NodalField& w);

/// Entry (l, j) = int w grad(eta_j) . grad(eta_l) dx.
LinearOperator assemble_weighted_stiffness(const TetMesh& mesh, const NodalField& w);

struct AdvectionOptions {
  /// Adds isotropic streamline diffusion 0.5 * h * |v| * w per element.
  bool artificial_diffusion = false;
};

/// Entry (l, j) = int w (v . grad(eta_j)) eta_l dx with v constant per tet.
LinearOperator assemble_advection(const TetMesh& mesh, std::span<const Vec3> velocity,
                                  const NodalField& w, AdvectionOptions options = {});

/// Load vector int f eta_l dx for f given as a P1 field.
Vector assemble_load(const TetMesh& mesh, const NodalField& f);

/// Integral of a P1 field over the domain (quadrature exact for P1).
double integrate(const TetMesh& mesh, const NodalField& f);

/// Integral of the product of two P1 fields.
double integrate_product(const TetMesh& mesh, const NodalField& a, const NodalField& b);

}  // namespace angio
