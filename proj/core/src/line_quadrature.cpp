#include "angio/line_quadrature.hpp"

#include "angio/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace angio {

LineQuadrature::LineQuadrature(const TetMesh& mesh, const VesselNetwork& net) : mesh_(&mesh), net_(&net) {
  if (!net.partitioned()) {
    throw InputError("line quadrature needs built network partitions");
  }
  for (int si = 0; si < net.num_segments(); ++si) {
    const Segment& s = net.segments()[static_cast<std::size_t>(si)];
    const int ne = s.primary_nodes - 1;
    const int na = s.aux_nodes - 1;
    std::vector<double> breaks;
    for (const auto& p : s.pieces) {
      breaks.push_back(p.t0);
      breaks.push_back(p.t1);
    }
    for (int k = 0; k <= ne; ++k) {
      breaks.push_back(static_cast<double>(k) / ne);
    }
    for (int k = 0; k <= na; ++k) {
      breaks.push_back(static_cast<double>(k) / na);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-14; }),
                 breaks.end());
    std::size_t piece = 0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
      const double t0 = breaks[i];
      const double t1 = breaks[i + 1];
      const double tm = 0.5 * (t0 + t1);
      while (piece + 1 < s.pieces.size() && tm > s.pieces[piece].t1) {
        ++piece;
      }
      const int tet = s.pieces[piece].tet;
      const int elem = std::min(ne - 1, static_cast<int>(std::floor(tm * ne)));
      const int aelem = std::min(na - 1, static_cast<int>(std::floor(tm * na)));
      for (const auto& g : quadrature::kGauss2) {
        LineQuadPoint q;
        q.segment = si;
        q.t = t0 + g.xi * (t1 - t0);
        q.weight = g.weight * (t1 - t0) * s.length;
        q.x = net.point(si, q.t);
        q.tet = tet;
        // Unclipped barycentrics stay exact for points on the tet boundary.
        q.bary = mesh.barycentric(tet, q.x);
        q.element = elem;
        q.xi = q.t * ne - elem;
        q.aux_element = aelem;
        q.aux_xi = q.t * na - aelem;
        points_.push_back(q);
      }
    }
  }
}

int LineQuadrature::dim(LineSpace space) const {
  switch (space) {
    case LineSpace::tissue: return mesh_->num_nodes();
    case LineSpace::primary: return net_->num_dofs();
    case LineSpace::aux: return net_->num_aux_dofs();
  }
  return 0;
}

template <typename F>
void LineQuadrature::for_each_basis(LineSpace space, const LineQuadPoint& q, F&& f) const {
  switch (space) {
    case LineSpace::tissue: {
      const auto& tet = mesh_->tets()[static_cast<std::size_t>(q.tet)];
      for (int a = 0; a < 4; ++a) {
        f(tet[static_cast<std::size_t>(a)], q.bary[static_cast<std::size_t>(a)]);
      }
      break;
    }
    case LineSpace::primary: {
      const Segment& s = net_->segments()[static_cast<std::size_t>(q.segment)];
      f(s.dofs[static_cast<std::size_t>(q.element)], 1.0 - q.xi);
      f(s.dofs[static_cast<std::size_t>(q.element + 1)], q.xi);
      break;
    }
    case LineSpace::aux: {
      const Segment& s = net_->segments()[static_cast<std::size_t>(q.segment)];
      f(s.aux_offset + q.aux_element, 1.0 - q.aux_xi);
      f(s.aux_offset + q.aux_element + 1, q.aux_xi);
      break;
    }
  }
}

LinearOperator LineQuadrature::line_mass(LineSpace a, LineSpace b, const Vector& weight) const {
  if (weight.size() != 0 && weight.size() != size()) {
    throw InputError("line_mass: weight must have one value per quadrature point");
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(points_.size() * 16);
  for (std::size_t qi = 0; qi < points_.size(); ++qi) {
    const auto& q = points_[qi];
    const double w = q.weight * (weight.size() ? weight[static_cast<Eigen::Index>(qi)] : 1.0);
    if (w == 0.0) {
      continue;
    }
    for_each_basis(a, q, [&](int ia, double va) {
      for_each_basis(b, q, [&](int ib, double vb) { triplets.emplace_back(ia, ib, w * (va * vb)); });
    });
  }
  LinearOperator op(dim(a), dim(b));
  op.setFromTriplets(triplets.begin(), triplets.end());
  op.makeCompressed();
  return op;
}

Vector LineQuadrature::evaluate(LineSpace space, const Vector& field) const {
  if (field.size() != dim(space)) {
    throw InputError("LineQuadrature::evaluate: field size mismatch");
  }
  Vector out(size());
  for (std::size_t qi = 0; qi < points_.size(); ++qi) {
    double v = 0.0;
    for_each_basis(space, points_[qi], [&](int i, double phi) { v += phi * field[i]; });
    out[static_cast<Eigen::Index>(qi)] = v;
  }
  return out;
}

Vector LineQuadrature::integrate_against(LineSpace space, const Vector& point_values) const {
  if (point_values.size() != size()) {
    throw InputError("LineQuadrature::integrate_against: size mismatch");
  }
  Vector out = Vector::Zero(dim(space));
  for (std::size_t qi = 0; qi < points_.size(); ++qi) {
    const double w = points_[qi].weight * point_values[static_cast<Eigen::Index>(qi)];
    for_each_basis(space, points_[qi], [&](int i, double phi) { out[i] += w * phi; });
  }
  return out;
}

double LineQuadrature::integrate(const Vector& point_values) const {
  if (point_values.size() != size()) {
    throw InputError("LineQuadrature::integrate: size mismatch");
  }
  double total = 0.0;
  for (std::size_t qi = 0; qi < points_.size(); ++qi) {
    total += points_[qi].weight * point_values[static_cast<Eigen::Index>(qi)];
  }
  return total;
}

double LineQuadrature::total_weight() const {
  double total = 0.0;
  for (const auto& q : points_) {
    total += q.weight;
  }
  return total;
}

}  // namespace angio
