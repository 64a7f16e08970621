#pragma once

#include "angio/common.hpp"
#include "angio/mesh.hpp"
#include "angio/vessel_network.hpp"

#include <array>
#include <vector>

namespace angio {

/// Function spaces that live on (or are traced onto) the network.
enum class LineSpace { tissue, primary, aux };

struct LineQuadPoint {
  int segment = -1;
  double t = 0.0;       // segment parameter in [0, 1]
  double weight = 0.0;  // mm
  Vec3 x = Vec3::Zero();
  int tet = -1;
  std::array<double, 4> bary{};
  int element = 0;  // primary element within the segment
  double xi = 0.0;  // local coordinate in the primary element
  int aux_element = 0;
  double aux_xi = 0.0;
};

/// Gauss quadrature on the network, refined so that every sub-interval lies
/// inside one tet, one primary element and one auxiliary element. Products of
/// three P1 functions are integrated exactly.
class LineQuadrature {
 public:
  LineQuadrature(const TetMesh& mesh, const VesselNetwork& net);

  const std::vector<LineQuadPoint>& points() const { return points_; }
  int size() const { return static_cast<int>(points_.size()); }
  int dim(LineSpace space) const;

  /// Entry (a, b) = sum_q w_q weight_q phi^A_a(x_q) phi^B_b(x_q).
  /// An empty weight means 1.
  LinearOperator line_mass(LineSpace a, LineSpace b, const Vector& weight = {}) const;

  /// Values of a field of the given space at the quadrature points.
  Vector evaluate(LineSpace space, const Vector& field) const;

  /// Vector with entries sum_q w_q f_q phi_a(x_q).
  Vector integrate_against(LineSpace space, const Vector& point_values) const;

  /// sum_q w_q f_q.
  double integrate(const Vector& point_values) const;

  /// Sum of weights per segment (segment lengths).
  double total_weight() const;

 private:
  template <typename F>
  void for_each_basis(LineSpace space, const LineQuadPoint& q, F&& f) const;

  const TetMesh* mesh_;
  const VesselNetwork* net_;
  std::vector<LineQuadPoint> points_;
};

}  // namespace angio
