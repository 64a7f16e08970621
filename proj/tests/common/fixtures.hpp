#pragma once

#include "angio/mesh.hpp"
#include "angio/vessel_network.hpp"

#include <filesystem>
#include <fstream>
#include <string>

namespace fixtures {

inline std::filesystem::path data_file(const std::string& name) {
  return std::filesystem::path(ANGIO_DATA_DIR) / name;
}

// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "angio_tests" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::filesystem::path write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path;
}

inline angio::TetMesh reference_tet() {
  return angio::TetMesh({angio::Vec3(0, 0, 0), angio::Vec3(1, 0, 0), angio::Vec3(0, 1, 0), angio::Vec3(0, 0, 1)},
                        {{0, 1, 2, 3}});
}

// One straight vessel a -> b with the given end kinds.
inline angio::VesselNetwork straight_vessel(const angio::Vec3& a, const angio::Vec3& b,
                                            angio::JunctionKind ka = angio::JunctionKind::inlet,
                                            angio::JunctionKind kb = angio::JunctionKind::outlet,
                                            double radius = 5e-3) {
  angio::VesselNetwork net(radius);
  const int j0 = net.add_junction(a, ka);
  const int j1 = net.add_junction(b, kb);
  net.add_segment(j0, j1, 0.0);
  net.reset_tips();
  return net;
}

}  // namespace fixtures

namespace fixtures {

// Polyline a -> b split at every tet crossing, so that each segment lies in
// a single tet and its P1 partition is conforming with the mesh.
inline angio::VesselNetwork conforming_chain(const angio::TetMesh& mesh, const angio::Vec3& a, const angio::Vec3& b,
                                             double radius = 5e-3) {
  const auto pieces = angio::clip_segment(mesh, a, b);
  angio::VesselNetwork net(radius);
  int prev = net.add_junction(a, angio::JunctionKind::inlet);
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const bool last = i + 1 == pieces.size();
    const angio::Vec3 x = last ? b : angio::Vec3(a + pieces[i].t1 * (b - a));
    const int j = net.add_junction(x, last ? angio::JunctionKind::outlet : angio::JunctionKind::interior);
    net.add_segment(prev, j, 0.0);
    prev = j;
  }
  net.reset_tips();
  return net;
}

}  // namespace fixtures

#include "angio/coupling.hpp"
#include "angio/line_quadrature.hpp"

#include <Eigen/SparseLU>

namespace fixtures {

// Generic coupled test problem: reaction-diffusion in the tissue, 1D
// diffusion with a Dirichlet inlet, constant exchange coefficient.
struct CouplingProblem {
  angio::LinearOperator a_omega;
  angio::Vector b_omega;
  angio::LinearOperator a_lambda;
  angio::Vector b_lambda;
  double beta = 0.0;
  std::vector<std::pair<int, double>> dirichlet;
};

inline CouplingProblem coupling_problem(const angio::TetMesh& mesh, const angio::VesselNetwork& net, double beta) {
  using namespace angio;
  CouplingProblem p;
  const int n = mesh.num_nodes();
  p.a_omega = assemble_weighted_stiffness(mesh, NodalField::Constant(n, 0.7)) +
              assemble_weighted_mass(mesh, NodalField::Constant(n, 0.4));
  NodalField f(n);
  for (int i = 0; i < n; ++i) f[i] = 1.0 + mesh.nodes()[i].x() * mesh.nodes()[i].y();
  p.b_omega = assemble_load(mesh, f);
  const int nh = net.num_dofs();
  p.a_lambda = assemble_1d_operator(net, Operator1D::stiffness, Vector::Constant(nh, 2.0)) +
               assemble_1d_operator(net, Operator1D::mass, Vector::Constant(nh, 0.1));
  p.b_lambda = assemble_1d_operator(net, Operator1D::mass, Vector::Ones(nh)) * Vector::Constant(nh, 0.5);
  p.beta = beta;
  for (int d : net.dofs_of_kind(JunctionKind::inlet)) p.dirichlet.emplace_back(d, 3.0);
  return p;
}

inline angio::CoupledSystem assemble(const angio::LineQuadrature& quad, const CouplingProblem& p) {
  return angio::make_coupled_system(quad, p.a_omega, p.b_omega, p.a_lambda, p.b_lambda,
                                    angio::Vector::Constant(quad.size(), p.beta), p.dirichlet);
}

// Direct solve of the substituted 3D-1D system on conforming partitions,
// built from the trace operator and the 1D mass only:
//   (A_O + T' M T) Q - T' M Qh = b_O,   (A_L + M) Qh - M T Q = b_L.
inline std::pair<angio::Vector, angio::Vector> monolithic(const angio::TetMesh& mesh, const angio::VesselNetwork& net,
                                                          const CouplingProblem& p) {
  using namespace angio;
  const int n = mesh.num_nodes();
  const int nh = net.num_dofs();
  const LinearOperator t = trace_operator(net, mesh);
  const LinearOperator m = assemble_1d_operator(net, Operator1D::mass, Vector::Constant(nh, p.beta));
  const LinearOperator tt = t.transpose();
  const LinearOperator b11 = p.a_omega + LinearOperator(tt * m * t);
  const LinearOperator b12 = -LinearOperator(tt * m);
  LinearOperator b21 = -LinearOperator(m * t);
  LinearOperator b22 = p.a_lambda + m;
  Vector rhs1 = p.b_lambda;
  std::vector<char> fixed(static_cast<std::size_t>(nh), 0);
  for (const auto& [d, v] : p.dirichlet) {
    fixed[static_cast<std::size_t>(d)] = 1;
    rhs1[d] = v;
  }
  std::vector<Eigen::Triplet<double>> tr;
  auto put = [&](const LinearOperator& blk, int r0, int c0, bool lower) {
    for (int k = 0; k < blk.outerSize(); ++k) {
      for (LinearOperator::InnerIterator it(blk, k); it; ++it) {
        if (lower && fixed[static_cast<std::size_t>(it.row())]) continue;
        tr.emplace_back(r0 + it.row(), c0 + it.col(), it.value());
      }
    }
  };
  put(b11, 0, 0, false);
  put(b12, 0, n, false);
  put(b21, n, 0, true);
  put(b22, n, n, true);
  for (const auto& [d, v] : p.dirichlet) tr.emplace_back(n + d, n + d, 1.0);
  LinearOperator a(n + nh, n + nh);
  a.setFromTriplets(tr.begin(), tr.end());
  Vector rhs(n + nh);
  rhs << p.b_omega, rhs1;
  Eigen::SparseLU<LinearOperator> lu(a);
  const Vector x = lu.solve(rhs);
  return {x.head(n), x.tail(nh)};
}

}  // namespace fixtures

#include "angio/tissue.hpp"

namespace fixtures {

// Scalar root of phi - phi0 = dt S_c(phi, c) phi by bisection on [phi0, phi_max).
inline double scalar_tumor_step(const angio::TumorConstitutive& tc, double phi0, double c, double dt) {
  auto f = [&](double x) { return x - phi0 - dt * angio::growth_rate(tc, x, c) * x; };
  double lo = phi0;
  double hi = tc.phi_max;
  if (f(lo) >= 0.0) return lo;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace fixtures
