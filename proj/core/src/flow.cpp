#include "angio/flow.hpp"

#include <cmath>
#include <numbers>

namespace angio {

FlowParameters FlowParameters::from(const ParameterSet& p) {
  FlowParameters fp;
  fp.kappa = p.kappa;
  fp.mu = p.mu;
  fp.beta_p0 = p.beta_p0;
  fp.r_p = p.r_p;
  fp.dp_onc = p.dp_onc;
  fp.beta_ls = p.beta_ls;
  fp.p_ls = p.p_ls;
  fp.p_in = p.p_in;
  fp.p_out = p.p_out;
  fp.radius = p.radius;
  return fp;
}

ExchangeCoefficients starling_flux_coefficients(const LineQuadrature& quad, const VesselNetwork& net,
                                                double beta0, double scale, double jump,
                                                const Vector& inner_prev, const Vector& outer_prev,
                                                const Vector& phil_trace) {
  const int nq = quad.size();
  if (inner_prev.size() != nq || outer_prev.size() != nq || phil_trace.size() != nq) {
    throw InputError("starling_flux_coefficients: values must be given per quadrature point");
  }
  ExchangeCoefficients out;
  out.coefficient.resize(nq);
  out.outward.resize(nq);
  const double perimeter = 2.0 * std::numbers::pi * net.radius();
  for (int q = 0; q < nq; ++q) {
    const auto& pt = quad.points()[static_cast<std::size_t>(q)];
    const bool grown = net.segments()[static_cast<std::size_t>(pt.segment)].birth_time > 0.0;
    const double beta = perimeter * beta0 * (grown ? scale : 1.0);
    const bool outward = inner_prev[q] > outer_prev[q] + jump;
    out.outward[q] = outward ? 1.0 : 0.0;
    out.coefficient[q] = outward ? beta : beta * phil_trace[q];
  }
  return out;
}

std::vector<Vec3> tissue_velocity(const TetMesh& mesh, const NodalField& p, const NodalField& phil,
                                  const FlowParameters& fp) {
  std::vector<Vec3> v(static_cast<std::size_t>(mesh.num_tets()));
  for (int t = 0; t < mesh.num_tets(); ++t) {
    const auto& tet = mesh.tets()[static_cast<std::size_t>(t)];
    const double pl = 0.25 * (phil[tet[0]] + phil[tet[1]] + phil[tet[2]] + phil[tet[3]]);
    v[static_cast<std::size_t>(t)] = -(1.0 / (1.0 - pl)) * (fp.kappa / fp.mu) * mesh.gradient(p, t);
  }
  return v;
}

std::vector<std::vector<double>> vessel_velocity(const VesselNetwork& net, const Vector& p_hat,
                                                 const FlowParameters& fp) {
  const double k = fp.radius * fp.radius / (8.0 * fp.mu);
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(net.num_segments()));
  for (const auto& s : net.segments()) {
    const double h = s.length / (s.primary_nodes - 1);
    std::vector<double> v(static_cast<std::size_t>(s.primary_nodes - 1));
    for (int e = 0; e + 1 < s.primary_nodes; ++e) {
      v[static_cast<std::size_t>(e)] =
          -k * (p_hat[s.dofs[static_cast<std::size_t>(e + 1)]] - p_hat[s.dofs[static_cast<std::size_t>(e)]]) / h;
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<std::pair<int, double>> pressure_dirichlet(const VesselNetwork& net, const FlowParameters& fp) {
  std::vector<std::pair<int, double>> out;
  for (int d : net.dofs_of_kind(JunctionKind::inlet)) {
    out.emplace_back(d, fp.p_in);
  }
  for (int d : net.dofs_of_kind(JunctionKind::outlet)) {
    out.emplace_back(d, fp.p_out);
  }
  return out;
}

PressureResult pressure_step(const TetMesh& mesh, const VesselNetwork& net, const LineQuadrature& quad,
                             const FlowParameters& fp, const TumorConstitutive& tc,
                             const PressureInputs& in) {
  const int n = mesh.num_nodes();
  if (!in.phi || !in.phil || !in.phil_prev || !in.oxygen_prev) {
    throw InputError("pressure_step: missing input fields");
  }
  const NodalField& phi = *in.phi;
  const NodalField& phil = *in.phil;
  if (phi.size() != n || phil.size() != n || in.phil_prev->size() != n || in.oxygen_prev->size() != n) {
    throw InputError("pressure_step: field sizes do not match the mesh");
  }
  if (in.p_hat_prev.size() != net.num_dofs() || in.psi_omega_prev.size() != net.num_aux_dofs()) {
    throw InputError("pressure_step: previous network state does not match the partitions");
  }
  if (phil.maxCoeff() >= 1.0 || phil.minCoeff() <= 0.0) {
    throw NumericalError("pressure_step: liquid fraction must lie in (0, 1)");
  }

  NodalField conductivity(n);
  NodalField lymph(n);
  NodalField f3d(n);
  NodalField growth(n);
  NodalField storage = NodalField::Zero(n);
  for (int i = 0; i < n; ++i) {
    conductivity[i] = phil[i] / (1.0 - phil[i]) * fp.kappa / fp.mu;
    lymph[i] = phil[i] * fp.beta_ls;
    growth[i] = in.growth_sink ? phi[i] * growth_rate(tc, phi[i], (*in.oxygen_prev)[i]) : 0.0;
    if (in.storage) {
      storage[i] = (phil[i] - (*in.phil_prev)[i]) / in.dt;
    }
    f3d[i] = lymph[i] * fp.p_ls - growth[i] - storage[i];
  }
  const LinearOperator lymph_mass = assemble_weighted_mass(mesh, lymph);
  const LinearOperator a_omega = assemble_weighted_stiffness(mesh, conductivity) + lymph_mass;
  const Vector load = assemble_load(mesh, f3d);
  const LinearOperator a_lambda = assemble_1d_operator(
      net, Operator1D::stiffness,
      Vector::Constant(net.num_dofs(), std::numbers::pi * std::pow(fp.radius, 4) / (8.0 * fp.mu)));
  const auto dirichlet = pressure_dirichlet(net, fp);
  const Vector phil_trace = quad.evaluate(LineSpace::tissue, phil);

  Vector inner = quad.evaluate(LineSpace::primary, in.p_hat_prev);
  Vector outer = quad.evaluate(LineSpace::aux, in.psi_omega_prev);
  PressureResult res;
  CoupledSolution sol;
  Vector coefficient;
  const int rounds = std::max(1, in.case_iterations);
  for (int round = 0; round < rounds; ++round) {
    coefficient = starling_flux_coefficients(quad, net, fp.beta_p0, fp.r_p, fp.dp_onc, inner, outer, phil_trace)
                      .coefficient;
    const Vector jump = coefficient * fp.dp_onc;
    const Vector b_omega = load - quad.integrate_against(LineSpace::tissue, jump);
    const Vector b_lambda = quad.integrate_against(LineSpace::primary, jump);
    const auto sys = make_coupled_system(quad, a_omega, b_omega, a_lambda, b_lambda, coefficient, dirichlet);
    sol = solve_kkt(build_saddle_system(sys));
    inner = quad.evaluate(LineSpace::primary, sol.q_hat);
    outer = quad.evaluate(LineSpace::aux, sol.psi_omega);
  }

  res.p = sol.q;
  res.p_hat = sol.q_hat;
  res.psi_omega = sol.psi_omega;
  res.psi_lambda = sol.psi_lambda;
  res.cost = sol.cost;
  res.residual = sol.residual;
  res.velocity = tissue_velocity(mesh, res.p, phil, fp);
  res.vessel_velocity = vessel_velocity(net, res.p_hat, fp);

  const Vector trace_p = quad.evaluate(LineSpace::tissue, res.p);
  const Vector psi_l = quad.evaluate(LineSpace::aux, res.psi_lambda);
  const Vector psi_o = quad.evaluate(LineSpace::aux, res.psi_omega);
  const Vector p_hat_q = quad.evaluate(LineSpace::primary, res.p_hat);
  const Vector dp = Vector::Constant(quad.size(), fp.dp_onc);
  res.source_3d = quad.integrate(coefficient.cwiseProduct(psi_l - trace_p - dp));
  res.sink_1d = quad.integrate(coefficient.cwiseProduct(p_hat_q - psi_o - dp));
  res.lymphatic = (lymph_mass * (res.p - NodalField::Constant(n, fp.p_ls))).sum();
  res.storage = integrate(mesh, storage);
  res.growth = integrate(mesh, growth);
  return res;
}

}  // namespace angio
