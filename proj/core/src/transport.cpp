#include "angio/transport.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <numbers>

namespace angio {

TransportParameters TransportParameters::from(const ParameterSet& p) {
  TransportParameters tp;
  tp.d_c = p.d_c;
  tp.d_c_vessel = p.d_c_vessel;
  tp.beta_c0 = p.beta_c0;
  tp.r_c = p.r_c;
  tp.m_c = p.m_c;
  tp.c_in = p.c_in;
  tp.phi_max = p.phi_max;
  tp.d_g = p.d_g;
  tp.sigma = p.sigma;
  tp.sigma_tilde = p.sigma_tilde;
  tp.production = p.production;
  tp.c_star = p.c_star;
  tp.b = p.b;
  tp.radius = p.radius;
  return tp;
}

OxygenResult oxygen_step(const TetMesh& mesh, const VesselNetwork& net, const LineQuadrature& quad,
                         const TransportParameters& tp, const OxygenInputs& in) {
  const int n = mesh.num_nodes();
  if (!in.c_prev || !in.phil || !in.vessel_velocity) {
    throw InputError("oxygen_step: missing input fields");
  }
  const NodalField& phil = *in.phil;
  if (in.c_prev->size() != n || phil.size() != n || static_cast<int>(in.velocity.size()) != mesh.num_tets()) {
    throw InputError("oxygen_step: field sizes do not match the mesh");
  }
  if (in.c_hat_prev.size() != net.num_dofs() || in.theta_omega_prev.size() != net.num_aux_dofs()) {
    throw InputError("oxygen_step: previous network state does not match the partitions");
  }

  const double area = std::numbers::pi * tp.radius * tp.radius;
  NodalField storage_w = phil / in.dt;
  NodalField diffusion_w = phil * tp.d_c;
  NodalField uptake_w(n);
  for (int i = 0; i < n; ++i) {
    uptake_w[i] = tp.m_c * phil[i] * (tp.phi_max - phil[i]);
  }
  LinearOperator a_omega = assemble_weighted_stiffness(mesh, diffusion_w) +
                           assemble_advection(mesh, in.velocity, phil, {tp.artificial_diffusion}) +
                           assemble_weighted_mass(mesh, uptake_w);
  Vector b_omega = Vector::Zero(n);
  if (!in.steady) {
    const LinearOperator m = assemble_weighted_mass(mesh, storage_w);
    a_omega += m;
    b_omega = m * (*in.c_prev);
  }

  const int nh = net.num_dofs();
  LinearOperator a_lambda =
      assemble_1d_operator(net, Operator1D::stiffness, Vector::Constant(nh, area * tp.d_c_vessel)) +
      assemble_1d_advection(net, *in.vessel_velocity, 1.0);  // v dC/ds as written, no cross-section factor
  Vector b_lambda = Vector::Zero(nh);
  if (!in.steady) {
    const LinearOperator m = assemble_1d_operator(net, Operator1D::mass, Vector::Constant(nh, area / in.dt));
    a_lambda += m;
    b_lambda = m * in.c_hat_prev;
  }

  std::vector<std::pair<int, double>> dirichlet;
  for (int d : net.dofs_of_kind(JunctionKind::inlet)) {
    dirichlet.emplace_back(d, tp.c_in);
  }
  if (tp.outlet == OutletCondition::zero_concentration) {
    for (int d : net.dofs_of_kind(JunctionKind::outlet)) {
      dirichlet.emplace_back(d, 0.0);
    }
  }

  const Vector phil_trace = quad.evaluate(LineSpace::tissue, phil);
  Vector inner = quad.evaluate(LineSpace::primary, in.c_hat_prev);
  Vector outer = quad.evaluate(LineSpace::aux, in.theta_omega_prev);
  CoupledSolution sol;
  Vector coefficient;
  const int rounds = std::max(1, in.case_iterations);
  for (int round = 0; round < rounds; ++round) {
    coefficient =
        starling_flux_coefficients(quad, net, tp.beta_c0, tp.r_c, 0.0, inner, outer, phil_trace).coefficient;
    const auto sys = make_coupled_system(quad, a_omega, b_omega, a_lambda, b_lambda, coefficient, dirichlet);
    sol = solve_kkt(build_saddle_system(sys));
    inner = quad.evaluate(LineSpace::primary, sol.q_hat);
    outer = quad.evaluate(LineSpace::aux, sol.psi_omega);
  }

  OxygenResult res;
  res.c = sol.q;
  res.c_hat = sol.q_hat;
  res.theta_omega = sol.psi_omega;
  res.theta_lambda = sol.psi_lambda;
  res.cost = sol.cost;
  res.residual = sol.residual;
  const Vector trace_c = quad.evaluate(LineSpace::tissue, res.c);
  res.source_3d = quad.integrate(coefficient.cwiseProduct(quad.evaluate(LineSpace::aux, res.theta_lambda) - trace_c));
  res.sink_1d = quad.integrate(
      coefficient.cwiseProduct(quad.evaluate(LineSpace::primary, res.c_hat) - quad.evaluate(LineSpace::aux, res.theta_omega)));
  return res;
}

double vegf_source(const TransportParameters& tp, double phi, double c, double phil) {
  return tp.production * phi * (1.0 - 1.0 / (1.0 + std::exp(tp.b * (1.0 - phil * c / tp.c_star))));
}

NodalField vegf_step(const TetMesh& mesh, const LineQuadrature* quad, const TransportParameters& tp,
                     const VegfInputs& in) {
  const int n = mesh.num_nodes();
  if (!in.g_prev || !in.phi || !in.phil || !in.oxygen) {
    throw InputError("vegf_step: missing input fields");
  }
  const NodalField& phil = *in.phil;
  if (in.g_prev->size() != n || in.phi->size() != n || phil.size() != n || in.oxygen->size() != n ||
      static_cast<int>(in.velocity.size()) != mesh.num_tets()) {
    throw InputError("vegf_step: field sizes do not match the mesh");
  }
  if (phil.maxCoeff() <= 0.0) {
    throw NumericalError("vegf_step: liquid fraction vanishes everywhere");
  }
  const LinearOperator m = assemble_weighted_mass(mesh, phil / in.dt);
  LinearOperator a = m + assemble_weighted_stiffness(mesh, phil * tp.d_g) +
                     assemble_advection(mesh, in.velocity, phil, {tp.artificial_diffusion}) +
                     assemble_weighted_mass(mesh, phil * tp.sigma);
  if (quad && quad->size() > 0) {
    const Vector sink = 2.0 * std::numbers::pi * tp.radius * tp.sigma_tilde *
                        quad->evaluate(LineSpace::tissue, phil);
    a += quad->line_mass(LineSpace::tissue, LineSpace::tissue, sink);
  }
  NodalField source(n);
  for (int i = 0; i < n; ++i) {
    source[i] = vegf_source(tp, (*in.phi)[i], (*in.oxygen)[i], phil[i]);
  }
  const Vector rhs = m * (*in.g_prev) + assemble_load(mesh, source);
  Eigen::SparseLU<LinearOperator, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) {
    throw NumericalError("vegf_step: factorization failed");
  }
  NodalField g = lu.solve(rhs);
  if (!g.allFinite()) {
    throw NumericalError("vegf_step: non-finite solution");
  }
  return g;
}

}  // namespace angio
