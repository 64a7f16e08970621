#include "angio/line_quadrature.hpp"
#include "angio/vessel_network.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include <cmath>
#include <limits>
#include <random>
#include <set>

using namespace angio;

namespace {

// Solves K x = 0 with the listed dofs fixed.
Vector solve_dirichlet(const LinearOperator& k, const std::vector<std::pair<int, double>>& fixed) {
  LinearOperator a = k;
  Vector rhs = Vector::Zero(k.rows());
  std::vector<char> is_fixed(static_cast<std::size_t>(k.rows()), 0);
  for (const auto& [d, v] : fixed) {
    is_fixed[static_cast<std::size_t>(d)] = 1;
    rhs[d] = v;
  }
  a = a.transpose();  // row access through columns
  for (int c = 0; c < a.outerSize(); ++c) {
    for (LinearOperator::InnerIterator it(a, c); it; ++it) {
      if (is_fixed[static_cast<std::size_t>(c)]) it.valueRef() = it.row() == c ? 1.0 : 0.0;
    }
  }
  a = a.transpose();
  Eigen::SparseLU<LinearOperator> lu(a);
  return lu.solve(rhs);
}

std::set<int> tets_of(const std::vector<LinePiece>& pieces) {
  std::set<int> s;
  for (const auto& p : pieces) s.insert(p.tet);
  return s;
}

}  // namespace

TEST_SUITE("network") {

TEST_CASE("partition node counts follow the crossed tets") {
  const TetMesh mesh = make_cube_mesh(3, 3.0);
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> u(0.05, 2.95);
  bool found = false;
  for (int attempt = 0; attempt < 5000 && !found; ++attempt) {
    const Vec3 a(u(gen), u(gen), u(gen));
    const Vec3 b = a + 0.6 * Vec3(u(gen) - 1.5, u(gen) - 1.5, u(gen) - 1.5).normalized();
    if ((b.array() < 0.01).any() || (b.array() > 2.99).any()) continue;
    if (tets_of(clip_segment(mesh, a, b)).size() != 4) continue;
    VesselNetwork net = fixtures::straight_vessel(a, b);
    build_partitions(net, mesh, 1.0);
    CHECK(net.segments()[0].primary_nodes == 5);
    CHECK(net.segments()[0].aux_nodes == 3);
    CHECK(net.num_dofs() == 5);
    CHECK(net.num_aux_dofs() == 3);
    found = true;
  }
  CHECK(found);

  const Vec3 c(0.3, 0.55, 0.62);
  VesselNetwork small = fixtures::straight_vessel(c, c + Vec3(0.01, 0.005, 0.0));
  REQUIRE(tets_of(clip_segment(mesh, small.point(0, 0), small.point(0, 1))).size() == 1);
  build_partitions(small, mesh);
  CHECK(small.segments()[0].primary_nodes == 2);
  CHECK(small.segments()[0].aux_nodes == 2);

  CHECK_THROWS_AS(small.add_segment(0, 0, 0.0), InputError);
}

TEST_CASE("clipped pieces cover the segment and leaving the domain is an error") {
  const TetMesh mesh = make_cube_mesh(4, 2.5);
  const Vec3 a(0.11, 0.37, 0.93);
  const Vec3 b(2.31, 1.71, 0.28);
  const auto pieces = clip_segment(mesh, a, b);
  CHECK(pieces.front().t0 == 0.0);
  CHECK(pieces.back().t1 == 1.0);
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    CHECK(pieces[i].t1 > pieces[i].t0);
    if (i > 0) CHECK(pieces[i].t0 == pieces[i - 1].t1);
    const Vec3 mid = a + 0.5 * (pieces[i].t0 + pieces[i].t1) * (b - a);
    const auto bary = mesh.barycentric(pieces[i].tet, mid);
    for (double l : bary) CHECK(l > -1e-10);
  }
  CHECK_THROWS_AS(clip_segment(mesh, a, Vec3(3.0, 1.0, 1.0)), InputError);
  VesselNetwork out = fixtures::straight_vessel(a, Vec3(2.6, 1.0, 1.0));
  CHECK_THROWS_AS(build_partitions(out, mesh), InputError);
}

TEST_CASE("straight vessel Laplace gives the linear profile") {
  const TetMesh mesh = make_cube_mesh(5, 2.5);
  VesselNetwork net = fixtures::straight_vessel(Vec3(0.0, 0.9, 1.23), Vec3(2.5, 1.4, 1.1));
  build_partitions(net, mesh, 2.0);
  const LinearOperator k = assemble_1d_operator(net, Operator1D::stiffness, Vector::Ones(net.num_dofs()));
  const Vector p = solve_dirichlet(k, {{0, 33.75}, {1, 35.0}});
  const double len = net.segments()[0].length;
  double err = 0.0;
  for (int d = 0; d < net.num_dofs(); ++d) {
    const double s = (net.dof_position(d) - net.junctions()[0].position).norm() / len;
    err = std::max(err, std::abs(p[d] - (33.75 + 1.25 * s)));
  }
  CHECK(err < 1e-10);
}

TEST_CASE("symmetric Y junction takes one third") {
  const TetMesh mesh = make_cube_mesh(4, 2.5);
  VesselNetwork net(5e-3);
  const Vec3 c(1.2, 1.3, 1.25);
  const int j0 = net.add_junction(c + Vec3(-0.8, 0.0, 0.0), JunctionKind::inlet);
  const int jc = net.add_junction(c, JunctionKind::interior);
  const int j1 = net.add_junction(c + 0.8 * Vec3(0.5, std::sqrt(3.0) / 2, 0.0), JunctionKind::outlet);
  const int j2 = net.add_junction(c + 0.8 * Vec3(0.5, -std::sqrt(3.0) / 2, 0.0), JunctionKind::outlet);
  net.add_segment(j0, jc, 0.0);
  net.add_segment(jc, j1, 0.0);
  net.add_segment(j2, jc, 0.0);  // orientation must not matter
  build_partitions(net, mesh);
  const LinearOperator k = assemble_1d_operator(net, Operator1D::stiffness, Vector::Ones(net.num_dofs()));
  const Vector p = solve_dirichlet(k, {{j0, 1.0}, {j1, 0.0}, {j2, 0.0}});
  CHECK(std::abs(p[jc] - 1.0 / 3.0) < 1e-10);
}

TEST_CASE("tree networks match the resistor circuit") {
  const TetMesh mesh = make_cube_mesh(4, 2.5);
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> u(0.2, 2.3);
  for (int trial = 0; trial < 5; ++trial) {
    VesselNetwork net(5e-3);
    const int nj = 7;
    for (int j = 0; j < nj; ++j) net.add_junction(Vec3(u(gen), u(gen), u(gen)), JunctionKind::interior);
    std::vector<std::pair<int, int>> edges;
    for (int j = 1; j < nj; ++j) {
      const int parent = std::uniform_int_distribution<int>(0, j - 1)(gen);
      net.add_segment(parent, j, 0.0);
      edges.emplace_back(parent, j);
    }
    std::vector<std::pair<int, double>> fixed;
    for (int j = 0; j < nj; ++j) {
      if (net.junctions()[j].segments.size() == 1) {
        const double v = u(gen);
        fixed.emplace_back(j, v);
        net.set_kind(j, JunctionKind::outlet);
      }
    }
    build_partitions(net, mesh);
    const LinearOperator k = assemble_1d_operator(net, Operator1D::stiffness, Vector::Ones(net.num_dofs()));
    const Vector p = solve_dirichlet(k, fixed);

    // Conductance 1/length per branch, Kirchhoff current law at free junctions.
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(nj, nj);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const double c = 1.0 / net.segments()[e].length;
      const auto [a, b] = edges[e];
      g(a, a) += c;
      g(b, b) += c;
      g(a, b) -= c;
      g(b, a) -= c;
    }
    Vector rhs = Vector::Zero(nj);
    for (const auto& [j, v] : fixed) {
      g.row(j).setZero();
      g(j, j) = 1.0;
      rhs[j] = v;
    }
    const Vector oracle = g.fullPivLu().solve(rhs);
    CHECK((p.head(nj) - oracle).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("1D mass rows sum to the network length") {
  const TetMesh mesh = make_cube_mesh(4, 2.5);
  VesselNetwork net = load_network(fixtures::data_file("testface_network.txt"), 5e-3);
  build_partitions(net, mesh);
  const LinearOperator m = assemble_1d_operator(net, Operator1D::mass, Vector::Ones(net.num_dofs()));
  CHECK(std::abs(Eigen::MatrixXd(m).sum() - net.total_length()) < 1e-12);
  CHECK(Eigen::MatrixXd(m - LinearOperator(m.transpose())).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("trace operator examples") {
  const TetMesh mesh = make_cube_mesh(5, 2.5);
  VesselNetwork net = fixtures::straight_vessel(Vec3(0.1, 1.13, 0.97), Vec3(2.4, 1.13, 0.97));
  build_partitions(net, mesh, 1.5);
  const LinearOperator t = trace_operator(net, mesh);
  CHECK(t.rows() == net.num_dofs());
  CHECK(t.cols() == mesh.num_nodes());
  const Vector c = t * Vector::Constant(mesh.num_nodes(), 4.2);
  CHECK((c.array() - 4.2).abs().maxCoeff() < 1e-12);
  NodalField x(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) x[i] = mesh.nodes()[i].x();
  const Vector tx = t * x;
  for (int d = 0; d < net.num_dofs(); ++d) CHECK(std::abs(tx[d] - net.dof_position(d).x()) < 1e-12);
  // Each 1D node reads only the nodes of one tet.
  const LinearOperator tt = t.transpose();
  for (int r = 0; r < tt.outerSize(); ++r) {
    int nnz = 0;
    for (LinearOperator::InnerIterator it(tt, r); it; ++it) ++nnz;
    CHECK(nnz <= 4);
  }
}

TEST_CASE("line source operator examples") {
  const TetMesh mesh = make_cube_mesh(4, 2.5);
  VesselNetwork net = load_network(fixtures::data_file("testface_network.txt"), 5e-3);
  build_partitions(net, mesh);
  const LinearOperator l = line_source_operator(net, mesh);
  CHECK(std::abs((l * Vector::Ones(net.num_dofs())).sum() - net.total_length()) < 1e-10);
  CHECK((l * Vector::Zero(net.num_dofs())).cwiseAbs().maxCoeff() == 0.0);

  // Segment across exactly two tets: support is the union of their nodes.
  std::mt19937 gen(9);
  std::uniform_real_distribution<double> u(0.1, 2.4);
  bool found = false;
  for (int attempt = 0; attempt < 5000 && !found; ++attempt) {
    const Vec3 a(u(gen), u(gen), u(gen));
    const Vec3 b = a + 0.2 * Vec3(u(gen) - 1.25, u(gen) - 1.25, u(gen) - 1.25).normalized();
    if ((b.array() < 0.05).any() || (b.array() > 2.45).any()) continue;
    const auto tets = tets_of(clip_segment(mesh, a, b));
    if (tets.size() != 2) continue;
    VesselNetwork one = fixtures::straight_vessel(a, b);
    build_partitions(one, mesh);
    const Vector load = line_source_operator(one, mesh) * Vector::Ones(one.num_dofs());
    std::set<int> allowed;
    for (int t : tets) for (int v : mesh.tets()[t]) allowed.insert(v);
    CHECK(allowed.size() <= 8);
    for (int i = 0; i < mesh.num_nodes(); ++i) {
      if (!allowed.count(i)) CHECK(load[i] == 0.0);
    }
    CHECK(std::abs(load.sum() - one.total_length()) < 1e-12);
    found = true;
  }
  CHECK(found);
}

TEST_CASE("line source is the transpose of trace against the 1D mass on conforming partitions") {
  const TetMesh mesh = make_cube_mesh(4, 2.5);
  VesselNetwork net = fixtures::conforming_chain(mesh, Vec3(0.0, 0.83, 1.37), Vec3(2.5, 1.61, 0.92));
  build_partitions(net, mesh);
  for (const auto& s : net.segments()) REQUIRE(s.primary_nodes == 2);
  const LinearOperator l = line_source_operator(net, mesh);
  const LinearOperator m = assemble_1d_operator(net, Operator1D::mass, Vector::Ones(net.num_dofs()));
  const LinearOperator t = trace_operator(net, mesh);
  const Eigen::MatrixXd diff = Eigen::MatrixXd(l) - Eigen::MatrixXd(LinearOperator(t.transpose()) * m);
  CHECK(diff.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("line quadrature integrates the network exactly") {
  const TetMesh mesh = make_cube_mesh(4, 2.5);
  VesselNetwork net = load_network(fixtures::data_file("testface_network.txt"), 5e-3);
  build_partitions(net, mesh);
  const LineQuadrature q(mesh, net);
  CHECK(std::abs(q.total_weight() - net.total_length()) < 1e-12);
  CHECK(q.dim(LineSpace::tissue) == mesh.num_nodes());
  CHECK(q.dim(LineSpace::primary) == net.num_dofs());
  CHECK(q.dim(LineSpace::aux) == net.num_aux_dofs());
  for (LineSpace s : {LineSpace::tissue, LineSpace::primary, LineSpace::aux}) {
    const LinearOperator g = q.line_mass(s, s);
    const Vector ones = Vector::Ones(q.dim(s));
    CHECK(std::abs(ones.dot(g * ones) - net.total_length()) < 1e-12);
    CHECK((q.evaluate(s, ones).array() - 1.0).abs().maxCoeff() < 1e-12);
  }
  // Cross space Gram block of the primary partition equals the 1D mass.
  const Eigen::MatrixXd m = Eigen::MatrixXd(assemble_1d_operator(net, Operator1D::mass, Vector::Ones(net.num_dofs())));
  CHECK((Eigen::MatrixXd(q.line_mass(LineSpace::primary, LineSpace::primary)) - m).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("network file round trip and structure") {
  VesselNetwork net = load_network(fixtures::data_file("testface_network.txt"), 5e-3);
  CHECK(net.num_junctions() == 6);
  CHECK(net.num_segments() == 5);
  CHECK(net.num_tips() == 2);
  CHECK(net.tips().size() == 2);
  for (const auto& j : net.junctions()) {
    if (j.kind == JunctionKind::interior) CHECK(j.segments.size() >= 2);
    else CHECK(j.segments.size() == 1);
  }
  const auto dir = fixtures::scratch_dir("network_io");
  save_network(dir / "net.txt", net);
  const VesselNetwork again = load_network(dir / "net.txt", 5e-3);
  REQUIRE(again.num_segments() == net.num_segments());
  for (int j = 0; j < net.num_junctions(); ++j) {
    CHECK(again.junctions()[j].position == net.junctions()[j].position);
    CHECK(again.junctions()[j].kind == net.junctions()[j].kind);
  }
  for (int s = 0; s < net.num_segments(); ++s) {
    CHECK(again.segments()[s].junctions == net.segments()[s].junctions);
    CHECK(again.segments()[s].birth_time == net.segments()[s].birth_time);
  }
  const auto bad = fixtures::write_text(dir / "bad.txt", "2 1\n0 0 0 inlet\n1 0 0 sideways\n0 1 0\n");
  CHECK_THROWS_AS(load_network(bad, 5e-3), InputError);
}

TEST_CASE("network statistics examples") {
  const TetMesh mesh = make_cube_mesh(4, 2.5);
  VesselNetwork one = fixtures::straight_vessel(Vec3(0.2, 0.3, 0.4), Vec3(1.2, 0.3, 0.4), JunctionKind::inlet,
                                                JunctionKind::tip);
  const NetworkStats s = network_stats(one, mesh);
  CHECK(s.length == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s.tips == 1);
  CHECK(s.density == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s.covered_fraction > 0.0);

  const VesselNetwork empty(5e-3);
  const NetworkStats e = network_stats(empty, mesh);
  CHECK(e.covered_fraction == 0.0);
  CHECK(e.length == 0.0);
  CHECK(e.density == std::numeric_limits<double>::infinity());
}

}  // TEST_SUITE
