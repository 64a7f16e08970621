#pragma once

#include "angio/common.hpp"
#include "angio/mesh.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace angio {

enum class JunctionKind { interior, inlet, outlet, tip };

std::string to_string(JunctionKind kind);
JunctionKind parse_junction_kind(const std::string& text);

struct Junction {
  Vec3 position = Vec3::Zero();
  JunctionKind kind = JunctionKind::interior;
  std::vector<int> segments;  // incident segment ids
};

/// Portion of a segment (parameter interval [t0, t1] of [0, 1]) inside one tet.
struct LinePiece {
  double t0 = 0.0;
  double t1 = 0.0;
  int tet = -1;
};

/// Straight capillary segment from junctions[0] (s = 0) to junctions[1] (s = S).
struct Segment {
  std::array<int, 2> junctions{-1, -1};
  double birth_time = 0.0;
  double length = 0.0;

  // Filled by build_partitions.
  std::vector<LinePiece> pieces;
  int primary_nodes = 0;
  int aux_nodes = 0;
  std::vector<int> dofs;  // global primary dof of each partition node
  int aux_offset = 0;     // first auxiliary dof; aux dofs are contiguous and per segment
};

struct Tip {
  int junction = -1;
  Vec3 accumulator = Vec3::Zero();
  double age = 0.0;
  int parent_segment = -1;
  Vec3 direction = Vec3::UnitX();  // unit vector of the parent segment, pointing to the tip
  bool frozen = false;
};

/// Graph of straight vessels with a single 1D dof per junction.
class VesselNetwork {
 public:
  VesselNetwork() = default;
  explicit VesselNetwork(double radius) : radius_(radius) {}

  double radius() const { return radius_; }
  void set_radius(double r) { radius_ = r; }

  const std::vector<Junction>& junctions() const { return junctions_; }
  const std::vector<Segment>& segments() const { return segments_; }
  const std::vector<Tip>& tips() const { return tips_; }
  std::vector<Tip>& tips() { return tips_; }

  int num_junctions() const { return static_cast<int>(junctions_.size()); }
  int num_segments() const { return static_cast<int>(segments_.size()); }

  int add_junction(const Vec3& x, JunctionKind kind);
  /// Appends a segment; throws if it is shorter than 1e-12 mm.
  int add_segment(int j0, int j1, double birth_time);
  void set_kind(int junction, JunctionKind kind) {
    junctions_[static_cast<std::size_t>(junction)].kind = kind;
  }

  /// Rebuilds the tip list from junctions of kind tip (fresh state).
  void reset_tips();

  Vec3 point(int segment, double t) const;
  /// Unit vector from junctions[0] to junctions[1].
  Vec3 direction(int segment) const;
  double total_length() const;
  int num_tips() const;

  bool partitioned() const { return partitioned_; }
  int num_dofs() const { return num_dofs_; }
  int num_aux_dofs() const { return num_aux_dofs_; }
  /// Position of a primary 1D dof.
  Vec3 dof_position(int dof) const;
  /// Dofs fixed by inlet or outlet markers.
  std::vector<int> dofs_of_kind(JunctionKind kind) const;

 private:
  friend void build_partitions(VesselNetwork& net, const TetMesh& mesh, double density_factor);

  double radius_ = 5e-3;
  std::vector<Junction> junctions_;
  std::vector<Segment> segments_;
  std::vector<Tip> tips_;
  bool partitioned_ = false;
  int num_dofs_ = 0;
  int num_aux_dofs_ = 0;
  std::vector<std::pair<int, int>> dof_owner_;  // (segment, node) for each dof
};

/// Reads "N_junctions N_segments", then "x y z flag" lines and "j1 j2 birth_time" lines.
VesselNetwork load_network(const std::filesystem::path& path, double radius);
void save_network(const std::filesystem::path& path, const VesselNetwork& net);

/// Exact clipping of the segment [a, b] against the mesh. Pieces cover [0, 1]
/// without overlap; throws InputError when part of the segment lies outside.
std::vector<LinePiece> clip_segment(const TetMesh& mesh, const Vec3& a, const Vec3& b);

/// Uniform primary and auxiliary partitions plus the global dof map.
/// Primary node count is ceil(factor * distinct tets crossed) + 1, min 2;
/// auxiliary partitions carry half of that, rounded up, min 2.
void build_partitions(VesselNetwork& net, const TetMesh& mesh, double density_factor = 1.0);

enum class Operator1D { mass, stiffness, advection };

/// P1 operator on the primary partitions. `coeff` is a nodal 1D field
/// (length num_dofs) interpolated linearly; for advection the derivative is
/// taken along the segment orientation.
LinearOperator assemble_1d_operator(const VesselNetwork& net, Operator1D kind, const Vector& coeff);

/// Advection with a velocity constant on each 1D element:
/// entry (l, j) = scale * int v d(eta_j)/ds eta_l ds.
LinearOperator assemble_1d_advection(const VesselNetwork& net,
                                     const std::vector<std::vector<double>>& element_velocity,
                                     double scale);

/// Centerline evaluation of 3D P1 fields at primary 1D nodes (num_dofs x N).
LinearOperator trace_operator(const VesselNetwork& net, const TetMesh& mesh);

/// N x num_dofs map of a P1 flux density on the network to int f eta_l ds.
LinearOperator line_source_operator(const VesselNetwork& net, const TetMesh& mesh);

struct NetworkStats {
  double length = 0.0;
  int tips = 0;
  double density = 0.0;  // length per tip, +inf without tips
  double covered_fraction = 0.0;
};

NetworkStats network_stats(const VesselNetwork& net, const TetMesh& mesh);

/// Values of a global 1D vector split per segment along its partition.
std::vector<std::vector<double>> split_by_segment(const VesselNetwork& net, const Vector& values);
std::vector<std::vector<double>> split_aux_by_segment(const VesselNetwork& net, const Vector& values);

}  // namespace angio
