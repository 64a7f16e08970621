#include "angio/transport.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <Eigen/SparseLU>

#include <cmath>
#include <numbers>

using namespace angio;

namespace {

const Vec3 kA(0.2, 1.17, 1.31);
const Vec3 kB(2.3, 1.29, 1.08);

struct OxygenCase {
  TetMesh mesh;
  VesselNetwork net;
  NodalField phil;
  NodalField c_prev;
  std::vector<Vec3> velocity;
  std::vector<std::vector<double>> vessel_velocity;

  explicit OxygenCase(int cells) : mesh(make_cube_mesh(cells, 2.5)), net(fixtures::straight_vessel(kA, kB)) {
    build_partitions(net, mesh);
    const int n = mesh.num_nodes();
    phil.resize(n);
    for (int i = 0; i < n; ++i) {
      phil[i] = 0.6 + 0.2 * std::cos(mesh.nodes()[i].x());
    }
    c_prev = NodalField::Zero(n);
    velocity.assign(static_cast<std::size_t>(mesh.num_tets()), Vec3::Zero());
    for (const auto& s : net.segments()) {
      vessel_velocity.emplace_back(static_cast<std::size_t>(s.primary_nodes - 1), 0.0);
    }
  }

  OxygenInputs inputs(const Vector& c_hat_prev, const Vector& theta_prev) const {
    OxygenInputs in;
    in.c_prev = &c_prev;
    in.phil = &phil;
    in.velocity = velocity;
    in.vessel_velocity = &vessel_velocity;
    in.c_hat_prev = c_hat_prev;
    in.theta_omega_prev = theta_prev;
    return in;
  }
};

// -D c'' + v c' + k c = 0 on one straight segment, solved with the 1D operators.
Vector solve_1d(const VesselNetwork& net, double d, double v, double k, const std::vector<std::pair<int, double>>& fixed) {
  const int nh = net.num_dofs();
  std::vector<std::vector<double>> vel;
  for (const auto& s : net.segments()) vel.emplace_back(static_cast<std::size_t>(s.primary_nodes - 1), v);
  LinearOperator a = assemble_1d_operator(net, Operator1D::stiffness, Vector::Constant(nh, d)) +
                     assemble_1d_advection(net, vel, 1.0) +
                     assemble_1d_operator(net, Operator1D::mass, Vector::Constant(nh, k));
  Vector rhs = Vector::Zero(nh);
  for (const auto& [dof, value] : fixed) {
    a.prune([dof](Eigen::Index r, Eigen::Index, double) { return r != dof; });
    a.coeffRef(dof, dof) = 1.0;
    rhs[dof] = value;
  }
  Eigen::SparseLU<LinearOperator> lu(a);
  return lu.solve(rhs);
}

}  // namespace

TEST_SUITE("transport") {

TEST_CASE("stationary oxygen state without exchange, uptake or flow") {
  OxygenCase oc(3);
  TransportParameters tp;
  tp.beta_c0 = 0.0;
  tp.m_c = 0.0;
  oc.c_prev = NodalField::Constant(oc.mesh.num_nodes(), 7.0);
  const auto r = oxygen_step(oc.mesh, oc.net, LineQuadrature(oc.mesh, oc.net), tp,
                             oc.inputs(Vector::Constant(oc.net.num_dofs(), tp.c_in),
                                       Vector::Constant(oc.net.num_aux_dofs(), 7.0)));
  CHECK((r.c.array() - 7.0).abs().maxCoeff() < 1e-10);
  CHECK((r.c_hat.array() - tp.c_in).abs().maxCoeff() < 1e-10);
  CHECK(std::abs(r.source_3d) < 1e-14);
}

TEST_CASE("1D advection-decay matches the exponential solutions") {
  const TetMesh mesh = make_cube_mesh(4, 2.5);
  const Vec3 a(0.1, 1.17, 1.31);
  const Vec3 b(2.4, 1.17, 1.31);
  VesselNetwork net = fixtures::straight_vessel(a, b);
  build_partitions(net, mesh, 60.0);
  const double len = (b - a).norm();
  const double d = 0.5;
  const double v = 2.0;
  const double k = 3.0;
  const double disc = std::sqrt(v * v + 4.0 * d * k);
  const double rp = (v + disc) / (2.0 * d);
  const double rm = (v - disc) / (2.0 * d);
  const int in = net.dofs_of_kind(JunctionKind::inlet).front();
  const int out = net.dofs_of_kind(JunctionKind::outlet).front();
  auto s_of = [&](int dof) { return (net.dof_position(dof) - a).norm(); };

  // Exact end values: the decaying exponential alone.
  const Vector c1 = solve_1d(net, d, v, k, {{in, 1.0}, {out, std::exp(rm * len)}});
  double err1 = 0.0;
  for (int i = 0; i < net.num_dofs(); ++i) err1 = std::max(err1, std::abs(c1[i] / std::exp(rm * s_of(i)) - 1.0));
  MESSAGE("pure exponential error " << err1);
  CHECK(err1 < 1e-3);

  // Zero diffusive flux at the outlet: both roots.
  const double e_p = rp * std::exp(rp * len);
  const double e_m = rm * std::exp(rm * len);
  const double big_a = -e_m / (e_p - e_m);
  const double big_b = 1.0 - big_a;
  const Vector c2 = solve_1d(net, d, v, k, {{in, 1.0}});
  double err2 = 0.0;
  for (int i = 0; i < net.num_dofs(); ++i) {
    const double s = s_of(i);
    err2 = std::max(err2, std::abs(c2[i] / (big_a * std::exp(rp * s) + big_b * std::exp(rm * s)) - 1.0));
  }
  MESSAGE("two-root error " << err2);
  CHECK(err2 < 1e-3);
}

TEST_CASE("tissue oxygen stays within [0, c_in] over ten steps") {
  OxygenCase oc(6);
  const LineQuadrature quad(oc.mesh, oc.net);
  TransportParameters tp;
  for (auto& e : oc.vessel_velocity) std::fill(e.begin(), e.end(), -50.0);
  for (auto& u : oc.velocity) u = Vec3(1e-3, 0.0, -5e-4);
  Vector c_hat = Vector::Zero(oc.net.num_dofs());
  Vector theta = Vector::Zero(oc.net.num_aux_dofs());
  for (int step = 0; step < 10; ++step) {
    const auto r = oxygen_step(oc.mesh, oc.net, quad, tp, oc.inputs(c_hat, theta));
    CHECK(r.c.minCoeff() >= -1e-6 * tp.c_in);
    CHECK(r.c.maxCoeff() <= tp.c_in * (1.0 + 1e-6));
    CHECK(r.c_hat.allFinite());
    CHECK(r.source_3d > 0.0);
    oc.c_prev = r.c;
    c_hat = r.c_hat;
    theta = r.theta_omega;
  }
  CHECK(oc.c_prev.maxCoeff() > 1.0);
}

TEST_CASE("tissue oxygen budget closes without advection") {
  OxygenCase oc(4);
  const LineQuadrature quad(oc.mesh, oc.net);
  const TransportParameters tp;
  const int n = oc.mesh.num_nodes();
  for (int i = 0; i < n; ++i) oc.c_prev[i] = 20.0 + 3.0 * oc.mesh.nodes()[i].y();
  OxygenInputs in = oc.inputs(Vector::Constant(oc.net.num_dofs(), 50.0), Vector::Constant(oc.net.num_aux_dofs(), 20.0));
  const auto r = oxygen_step(oc.mesh, oc.net, quad, tp, in);
  NodalField uptake(n);
  for (int i = 0; i < n; ++i) uptake[i] = tp.m_c * oc.phil[i] * (tp.phi_max - oc.phil[i]);
  const double storage = (assemble_weighted_mass(oc.mesh, oc.phil / in.dt) * (r.c - oc.c_prev)).sum();
  const double consumed = (assemble_weighted_mass(oc.mesh, uptake) * r.c).sum();
  CHECK(std::abs(storage + consumed - r.source_3d) < 1e-10 * (std::abs(storage) + std::abs(consumed)));
}

TEST_CASE("VEGF source anchors") {
  TransportParameters tp;
  tp.production = 2.0;
  CHECK(vegf_source(tp, 1.0, tp.c_star, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(vegf_source(tp, 0.5, 0.0, 0.7) == doctest::Approx(1.0 - 1.0 / (1.0 + std::exp(tp.b))).epsilon(1e-15));
  CHECK(vegf_source(tp, 0.0, 3.0, 0.7) == 0.0);
  CHECK(vegf_source(tp, 0.5, 10.0 * tp.c_star, 1.0) < 1e-30);
  // Hypoxia raises production.
  CHECK(vegf_source(tp, 0.5, 5.0, 0.5) > vegf_source(tp, 0.5, 30.0, 0.5));
}

TEST_CASE("VEGF step reproduces the uniform scalar update") {
  const TetMesh mesh = make_cube_mesh(3, 2.5);
  const int n = mesh.num_nodes();
  const TransportParameters tp;
  const NodalField phi = NodalField::Constant(n, 0.4);
  const NodalField phil = NodalField::Constant(n, 0.6);
  const NodalField oxygen = NodalField::Constant(n, 12.0);
  const NodalField g0 = NodalField::Constant(n, 0.3);
  const std::vector<Vec3> vel(static_cast<std::size_t>(mesh.num_tets()), Vec3::Zero());
  VegfInputs in{&g0, &phi, &phil, &oxygen, vel, 6.0};
  const NodalField g = vegf_step(mesh, nullptr, tp, in);
  const double src = vegf_source(tp, 0.4, 12.0, 0.6);
  const double expected = (0.6 * 0.3 / 6.0 + src) / (0.6 / 6.0 + 0.6 * tp.sigma);
  CHECK((g.array() - expected).abs().maxCoeff() < 1e-12);

  TransportParameters none = tp;
  none.production = 0.0;
  const NodalField zero = NodalField::Zero(n);
  VegfInputs in0{&zero, &phi, &phil, &oxygen, vel, 6.0};
  CHECK(vegf_step(mesh, nullptr, none, in0).cwiseAbs().maxCoeff() == 0.0);

  // Very large steps approach the steady state instead of blowing up.
  in.dt = 1e8;
  const NodalField gs = vegf_step(mesh, nullptr, tp, in);
  CHECK((gs.array() - src / (0.6 * tp.sigma)).abs().maxCoeff() < 1e-6);
}

TEST_CASE("vessel wall sink lowers VEGF and keeps it nonnegative") {
  OxygenCase oc(4);
  const LineQuadrature quad(oc.mesh, oc.net);
  TransportParameters tp;
  tp.sigma_tilde = 50.0;
  const int n = oc.mesh.num_nodes();
  NodalField phi(n), oxygen(n);
  for (int i = 0; i < n; ++i) {
    const Vec3& x = oc.mesh.nodes()[i];
    phi[i] = 1.0 - oc.phil[i];
    oxygen[i] = 5.0 + 4.0 * x.z();
  }
  const NodalField g0 = NodalField::Constant(n, 0.1);
  VegfInputs in{&g0, &phi, &oc.phil, &oxygen, oc.velocity, 6.0};
  const NodalField free = vegf_step(oc.mesh, nullptr, tp, in);
  const NodalField sunk = vegf_step(oc.mesh, &quad, tp, in);
  CHECK(integrate_product(oc.mesh, oc.phil, sunk) < integrate_product(oc.mesh, oc.phil, free));
  CHECK(sunk.minCoeff() >= 0.0);
  CHECK(free.minCoeff() >= 0.0);
}

TEST_CASE("transport inputs are validated") {
  OxygenCase oc(2);
  const LineQuadrature quad(oc.mesh, oc.net);
  OxygenInputs in = oc.inputs(Vector::Zero(oc.net.num_dofs()), Vector::Zero(3));
  CHECK_THROWS_AS(oxygen_step(oc.mesh, oc.net, quad, TransportParameters{}, in), InputError);
  const int n = oc.mesh.num_nodes();
  const NodalField zero = NodalField::Zero(n);
  VegfInputs vin{&zero, &zero, &zero, &zero, oc.velocity, 6.0};
  CHECK_THROWS_AS(vegf_step(oc.mesh, nullptr, TransportParameters{}, vin), NumericalError);
}

}
