// Acceptance checks. Prints one PASS/FAIL line per criterion; arguments select
// criteria by number (default: all). Exit status is 1 when any selected
// criterion fails.

#include "angio/config.hpp"
#include "angio/flow.hpp"
#include "angio/quadrature.hpp"
#include "angio/sensitivity.hpp"
#include "angio/simulation.hpp"
#include "angio/state_io.hpp"
#include "angio/transport.hpp"
#include "fixtures.hpp"

#include <Eigen/SparseLU>

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace angio;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records a check; failed checks are listed first in the detail line.
  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (ok ? "" : "FAILED ") << what << "; ";
  }
};

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(4);
  s << x;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SimulationConfig make_config(const std::string& run_keys, const std::string& extra = "") {
  const std::string text = "[run]\nnetwork = testface_network.txt\ndt = 6 h\nvtk_every = 0\n" + run_keys + extra;
  return validate_config(text, ANGIO_DATA_DIR).config;
}

// ---------------------------------------------------------------------------

void fem_convergence(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  auto error = [](int cells) {
    const TetMesh m = make_cube_mesh(cells, 1.0);
    const int n = m.num_nodes();
    const double pi = std::numbers::pi;
    auto exact = [&](const Vec3& x) { return std::cos(pi * x.x()) * std::cos(pi * x.y()) * std::cos(pi * x.z()); };
    NodalField f(n);
    for (int i = 0; i < n; ++i) f[i] = (3.0 * pi * pi + 1.0) * exact(m.nodes()[i]);
    const LinearOperator a =
        assemble_weighted_stiffness(m, NodalField::Ones(n)) + assemble_weighted_mass(m, NodalField::Ones(n));
    Eigen::SparseLU<LinearOperator> lu(a);
    const NodalField uh = lu.solve(assemble_load(m, f));
    double e2 = 0.0;
    for (int t = 0; t < m.num_tets(); ++t) {
      const auto& tet = m.tets()[t];
      for (const auto& q : quadrature::kTet4) {
        Vec3 x = Vec3::Zero();
        double v = 0.0;
        for (int k = 0; k < 4; ++k) {
          x += q.bary[k] * m.nodes()[tet[k]];
          v += q.bary[k] * uh[tet[k]];
        }
        e2 += q.weight * m.geometry(t).volume * std::pow(v - exact(x), 2);
      }
    }
    return std::sqrt(e2);
  };
  const double e4 = error(4);
  const double e8 = error(8);
  const double e16 = error(16);
  const double coarse = std::log2(e4 / e8);
  const double fine = std::log2(e8 / e16);
  o.detail << "L2 errors " << fmt(e4) << ", " << fmt(e8) << ", " << fmt(e16) << "; rates " << fmt(coarse) << ", "
           << fmt(fine) << "; ";
  o.check(fine >= 1.8, "rate on the finest pair >= 1.8");
  const double wall = seconds_since(t0);
  o.check(wall < 60.0, "runtime " + fmt(wall) + " s < 60 s");
}

// K x = 0 with fixed dofs, via row replacement.
Vector solve_fixed(LinearOperator a, const std::vector<std::pair<int, double>>& fixed) {
  Vector rhs = Vector::Zero(a.rows());
  for (const auto& [dof, value] : fixed) {
    a.prune([dof](Eigen::Index r, Eigen::Index, double) { return r != dof; });
    a.coeffRef(dof, dof) = 1.0;
    rhs[dof] = value;
  }
  Eigen::SparseLU<LinearOperator> lu(a);
  return lu.solve(rhs);
}

void poiseuille(Outcome& o) {
  // Pressure solve with an impermeable wall.
  const TetMesh mesh = make_cube_mesh(4, 2.5);
  const Vec3 a(0.2, 1.17, 1.31);
  const Vec3 b(2.3, 1.29, 1.08);
  VesselNetwork net = fixtures::straight_vessel(a, b);
  build_partitions(net, mesh);
  const LineQuadrature quad(mesh, net);
  const int n = mesh.num_nodes();
  NodalField phi = NodalField::Constant(n, 0.4);
  NodalField phil = NodalField::Constant(n, 0.6);
  NodalField oxygen = NodalField::Constant(n, 60.0);
  FlowParameters fp;
  fp.beta_p0 = 0.0;
  PressureInputs in;
  in.phi = &phi;
  in.phil = &phil;
  in.phil_prev = &phil;
  in.oxygen_prev = &oxygen;
  in.p_hat_prev = Vector::Constant(net.num_dofs(), 34.0);
  in.psi_omega_prev = Vector::Zero(net.num_aux_dofs());
  const auto r = pressure_step(mesh, net, quad, fp, TumorConstitutive{}, in);
  double err = 0.0;
  for (int d = 0; d < net.num_dofs(); ++d) {
    const double s = (net.dof_position(d) - a).norm() / (b - a).norm();
    err = std::max(err, std::abs(r.p_hat[d] - (fp.p_in + (fp.p_out - fp.p_in) * s)));
  }
  o.check(err < 1e-10, "straight vessel max nodal error " + fmt(err) + " < 1e-10");

  // Symmetric Y: the junction takes one third of the inlet value.
  VesselNetwork y(5e-3);
  const Vec3 c(1.2, 1.3, 1.25);
  const int j0 = y.add_junction(c + Vec3(-0.8, 0.0, 0.0), JunctionKind::inlet);
  const int jc = y.add_junction(c, JunctionKind::interior);
  const int j1 = y.add_junction(c + 0.8 * Vec3(0.5, std::sqrt(3.0) / 2, 0.0), JunctionKind::outlet);
  const int j2 = y.add_junction(c + 0.8 * Vec3(0.5, -std::sqrt(3.0) / 2, 0.0), JunctionKind::outlet);
  y.add_segment(j0, jc, 0.0);
  y.add_segment(jc, j1, 0.0);
  y.add_segment(j2, jc, 0.0);
  build_partitions(y, mesh);
  const Vector py = solve_fixed(assemble_1d_operator(y, Operator1D::stiffness, Vector::Ones(y.num_dofs())),
                                {{j0, 1.0}, {j1, 0.0}, {j2, 0.0}});
  const double ey = std::abs(py[jc] - 1.0 / 3.0);
  o.check(ey < 1e-10, "Y junction error " + fmt(ey) + " < 1e-10");
}

void coupling_oracle(Outcome& o) {
  const TetMesh mesh = make_cube_mesh(4, 2.5);
  VesselNetwork net = fixtures::conforming_chain(mesh, Vec3(0.0, 0.83, 1.37), Vec3(2.5, 1.61, 0.92));
  build_partitions(net, mesh);
  const LineQuadrature quad(mesh, net);
  double worst = 0.0;
  for (double beta : {0.3, 5.0, 80.0}) {
    const auto p = fixtures::coupling_problem(mesh, net, beta);
    const CoupledSolution sol = solve_kkt(build_saddle_system(fixtures::assemble(quad, p)));
    const auto [q, qh] = fixtures::monolithic(mesh, net, p);
    const double scale = std::max(q.cwiseAbs().maxCoeff(), qh.cwiseAbs().maxCoeff());
    worst = std::max({worst, (sol.q - q).cwiseAbs().maxCoeff() / scale, (sol.q_hat - qh).cwiseAbs().maxCoeff() / scale});
  }
  o.check(worst < 1e-8, "conforming vs monolithic relative error " + fmt(worst) + " < 1e-8");

  VesselNetwork straight = fixtures::straight_vessel(Vec3(0.0, 1.1, 1.3), Vec3(2.5, 1.4, 1.0));
  build_partitions(straight, mesh);
  const LineQuadrature q2(mesh, straight);
  const int n = mesh.num_nodes();
  const int nh = straight.num_dofs();
  const LinearOperator mass = assemble_weighted_mass(mesh, NodalField::Ones(n));
  const LinearOperator k1d = assemble_1d_operator(straight, Operator1D::stiffness, Vector::Ones(nh));
  const auto sys = make_coupled_system(q2, mass, mass * Vector::Constant(n, 2.0), k1d, Vector::Zero(nh),
                                       Vector::Zero(q2.size()), {{0, 1.0}, {1, 4.0}});
  const CoupledSolution sol = solve_kkt(build_saddle_system(sys));
  o.check(sol.cost <= 1e-12, "decoupled limit J = " + fmt(sol.cost) + " <= 1e-12");
}

void newton_verification(Outcome& o) {
  {
    const TetMesh mesh = make_cube_mesh(3, 2.5);
    const TumorConstitutive tc;
    const int n = mesh.num_nodes();
    std::mt19937 gen(21);
    std::uniform_real_distribution<double> u(0.1, 0.8);
    std::uniform_real_distribution<double> uc(60.0, 90.0);
    std::normal_distribution<double> nd;
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      NodalField phi(n), phi0(n), c(n), v(n);
      for (int i = 0; i < n; ++i) {
        phi[i] = u(gen);
        phi0[i] = u(gen);
        c[i] = trial % 2 ? uc(gen) : 0.0;
        v[i] = nd(gen);
      }
      const double h = 1e-6;
      const Vector g0 = tumor_residual(mesh, tc, phi, phi0, c, 6.0);
      const Vector g1 = tumor_residual(mesh, tc, phi + h * v, phi0, c, 6.0);
      const Vector jv = tumor_jacobian(mesh, tc, phi, c, 6.0) * v;
      worst = std::max(worst, ((g1 - g0) / h - jv).norm() / jv.norm());
    }
    o.check(worst < 1e-5, "Jacobian vs finite differences " + fmt(worst) + " < 1e-5");
  }
  {
    const TetMesh mesh = make_cube_mesh(4, 2.5);
    TumorConstitutive tc;
    tc.gamma = 0.1;
    const int n = mesh.num_nodes();
    NodalField phi0(n), c(n);
    for (int i = 0; i < n; ++i) {
      const Vec3& x = mesh.nodes()[i];
      phi0[i] = 0.2 + 0.1 * std::sin(1.3 * x.x()) * std::cos(0.9 * x.y());
      c[i] = 80.0 + 10.0 * std::cos(x.x() + x.z());
    }
    NewtonSettings s;
    s.rel_tolerance = 1e-14;
    s.abs_tolerance_per_node = 1e-17;
    const auto r = tumor_step(mesh, tc, phi0, c, 12.0, s);
    const auto& d = r.increments;
    double slope = 0.0;
    if (d.size() >= 3) {
      const std::size_t k = d.size() - 2;
      slope = std::log(d[k + 1] / d[k]) / std::log(d[k] / d[k - 1]);
    }
    o.check(slope >= 1.9, "terminal convergence slope " + fmt(slope) + " >= 1.9");
  }
  {
    const TetMesh mesh = make_cube_mesh(3, 2.5);
    const TumorConstitutive tc;
    NewtonSettings tight;
    tight.rel_tolerance = 1e-14;
    tight.abs_tolerance_per_node = 1e-15;
    double worst = 0.0;
    for (double c : {20.0, 40.0, 90.0}) {
      const auto r = tumor_step(mesh, tc, NodalField::Constant(mesh.num_nodes(), 0.3),
                                NodalField::Constant(mesh.num_nodes(), c), 6.0, tight);
      const double oracle = fixtures::scalar_tumor_step(tc, 0.3, c, 6.0);
      worst = std::max(worst, (r.phi.array() - oracle).abs().maxCoeff() / oracle);
    }
    o.check(worst < 1e-10, "0D scalar oracle " + fmt(worst) + " < 1e-10");
  }
}

void conservation(Outcome& o) {
  const SimulationConfig cfg = make_config("mesh = cube:7\nT = 60 h\nseed = 5\n", "[initial]\ng = 1.2\n");
  Simulation sim(cfg);
  double worst_p = 0.0;
  double worst_c = 0.0;
  int bad_p = 0;
  int bad_c = 0;
  while (!sim.finished()) {
    const StepRecord& r = sim.advance();
    const double gp = std::abs(r.pressure_source_3d - r.pressure_sink_1d) / std::abs(r.pressure_sink_1d);
    const double gc = std::abs(r.oxygen_source_3d - r.oxygen_sink_1d) / std::abs(r.oxygen_sink_1d);
    worst_p = std::max(worst_p, gp);
    worst_c = std::max(worst_c, gc);
    bad_p += gp >= 1e-8;
    bad_c += gc >= 1e-8;
  }
  o.check(sim.state().step == 10, "10 steps");
  o.check(bad_p == 0, "pressure balance worst " + fmt(worst_p) + " < 1e-8 (" + std::to_string(bad_p) + " steps over)");
  o.check(bad_c == 0, "oxygen balance worst " + fmt(worst_c) + " < 1e-8 (" + std::to_string(bad_c) + " steps over)");
}

void anchors(Outcome& o) {
  const GrowthParameters gp;
  o.check(cell_cycle_time(gp, gp.g_bar) == 2.0 * gp.tau, "t_c(g_bar) = 2 tau");
  const TransportParameters tp;
  bool gamma_ok = true;
  for (double phi : {0.25, 0.5, 0.75}) {
    const double phil = 0.5;
    gamma_ok = gamma_ok && vegf_source(tp, phi, tp.c_star / phil, phil) == 0.5 * tp.production * phi;
  }
  o.check(gamma_ok, "Gamma_g(phi, c*/phil) = G phi / 2");
  InputSpace space;
  space.p = 4;
  o.check(space.delta() == 2.0 / 3.0, "Delta(p = 4) = 2/3");
  double worst = 0.0;
  for (const GrowthParameters& g : {GrowthParameters{}, GrowthParameters{0.1, 1.08, 1.81}}) {
    worst = std::max({worst, std::abs(branching_probability(g, g.g_br) - 0.99),
                      std::abs(branching_probability(g, g.g_lim) - 0.05)});
  }
  o.check(worst < 1e-10, "P_br anchors error " + fmt(worst) + " < 1e-10");
}

void morris_oracles(Outcome& o) {
  const InputSpace space = parse_space("tumor.gamma uniform 0.01 0.03\ntumor.c_ref uniform 8.5 10.5\n"
                                       "growth.tau uniform 24 48\n");
  auto unit = [&](const std::vector<std::pair<std::string, double>>& ov, int i) {
    const InputSpec& in = space.inputs[static_cast<std::size_t>(i)];
    for (const auto& [k, v] : ov) {
      if (k == in.name) return (v - in.a) / (in.b - in.a);
    }
    throw InputError("missing override " + in.name);
  };
  const std::vector<double> coef = {2.0, -3.0, 0.5};
  const ModelFn linear = [&](const std::vector<std::pair<std::string, double>>& ov) {
    double y = 0.0;
    for (int i = 0; i < 3; ++i) y += coef[static_cast<std::size_t>(i)] * unit(ov, i);
    return std::vector<std::vector<double>>{{y}};
  };
  double mu_err = 0.0;
  double sigma_max = 0.0;
  for (std::uint64_t seed : {1u, 7u, 123u, 9001u}) {
    CampaignSettings s;
    s.R = 40;
    s.r = 8;
    s.seed = seed;
    s.outputs = {"y"};
    s.times = {24.0};
    const auto res = run_campaign(space, ParameterSet{}, s, linear);
    for (int i = 0; i < 3; ++i) {
      const EeStats& st = res.summary.stats[0][0][static_cast<std::size_t>(i)];
      mu_err = std::max(mu_err, std::abs(st.mu_star - std::abs(coef[static_cast<std::size_t>(i)])));
      sigma_max = std::max(sigma_max, st.sigma.value_or(INFINITY));
    }
  }
  o.check(mu_err < 1e-12, "linear mu* error " + fmt(mu_err));
  o.check(sigma_max <= 1e-12, "linear sigma " + fmt(sigma_max) + " <= 1e-12");

  const InputSpace two = parse_space("tumor.gamma uniform 0.01 0.03\ntumor.c_ref uniform 8.5 10.5\n");
  const ModelFn bilinear = [&](const std::vector<std::pair<std::string, double>>& ov) {
    double u[2];
    for (int i = 0; i < 2; ++i) {
      const InputSpec& in = two.inputs[static_cast<std::size_t>(i)];
      for (const auto& [k, v] : ov) {
        if (k == in.name) u[i] = (v - in.a) / (in.b - in.a);
      }
    }
    return std::vector<std::vector<double>>{{u[0] * u[1]}};
  };
  CampaignSettings sb;
  sb.R = 32;  // all distinct trajectories of two inputs on four levels
  sb.r = 10;
  sb.outputs = {"y"};
  sb.times = {1.0};
  const auto rb = run_campaign(two, ParameterSet{}, sb, bilinear);
  const double s0 = rb.summary.stats[0][0][0].sigma.value_or(0.0);
  const double s1 = rb.summary.stats[0][0][1].sigma.value_or(0.0);
  o.check(s0 > 0.0 && s1 > 0.0, "bilinear sigma " + fmt(s0) + ", " + fmt(s1) + " > 0");

  Rng rng(17);
  const auto all = generate_trajectories(space, 4, rng);
  double best = -1.0;
  std::vector<int> arg;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      double d = 0.0;
      const auto& a = all[static_cast<std::size_t>(i)].points;
      const auto& b = all[static_cast<std::size_t>(j)].points;
      for (const auto& x : a) {
        for (const auto& y : b) {
          double s = 0.0;
          for (std::size_t k = 0; k < x.size(); ++k) s += (x[k] - y[k]) * (x[k] - y[k]);
          d += std::sqrt(s);
        }
      }
      if (d > best) {
        best = d;
        arg = {i, j};
      }
    }
  }
  o.check(select_spread(all, 2) == arg, "selection matches exhaustive search for R = 4, r = 2");
}

// Final records of one preset over three seeds.
std::vector<StepRecord> preset_runs(const std::string& preset, double& slowest) {
  std::vector<StepRecord> out;
  for (int seed = 1; seed <= 3; ++seed) {
    const SimulationConfig cfg =
        make_config("mesh = cube:14\nT = 21 d\npreset = " + preset + "\nseed = " + std::to_string(seed) + "\n");
    const auto t0 = std::chrono::steady_clock::now();
    RunOptions opts;
    opts.write_files = false;
    out.push_back(run(cfg, opts).records.back());
    slowest = std::max(slowest, seconds_since(t0));
  }
  return out;
}

void set_ordering(Outcome& o) {
  double slowest = 0.0;
  const auto s1 = preset_runs("set1", slowest);
  const auto s2 = preset_runs("set2", slowest);
  int wins = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double gap = s2[i].mean_phi - s1[i].mean_phi;
    o.detail << "seed " << i + 1 << ": " << fmt(s1[i].mean_phi) << " vs " << fmt(s2[i].mean_phi) << "; ";
    wins += gap >= 0.05;
  }
  o.check(wins == 3, "set 2 exceeds set 1 by >= 0.05 in " + std::to_string(wins) + " of 3 seeds");
  o.check(slowest < 1800.0, "slowest run " + fmt(slowest) + " s < 1800 s");
}

void branching_ordering(Outcome& o) {
  double slowest = 0.0;
  const auto a = preset_runs("set1a", slowest);
  const auto b = preset_runs("set1b", slowest);
  int tips = 0;
  int density = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    o.detail << "seed " << i + 1 << ": tips " << a[i].tips << " vs " << b[i].tips << ", rho_net " << fmt(a[i].rho_net)
             << " vs " << fmt(b[i].rho_net) << ", V_omega " << fmt(a[i].v_omega) << " vs " << fmt(b[i].v_omega)
             << "; ";
    tips += a[i].tips > b[i].tips;
    density += a[i].rho_net > b[i].rho_net;
  }
  o.check(tips == 3, "more tips for tau_br = 48 h in " + std::to_string(tips) + " of 3 seeds");
  o.check(density == 3, "higher network density for tau_br = 48 h in " + std::to_string(density) + " of 3 seeds");
  o.check(slowest < 1800.0, "slowest run " + fmt(slowest) + " s < 1800 s");
}

void structural_invariants(Outcome& o) {
  const auto dir = fixtures::scratch_dir("acceptance_structure");
  SimulationConfig cfg = make_config("mesh = cube:7\nT = 5 d\nseed = 8\ncheckpoint_every = 8\n", "[initial]\ng = 1.2\n");
  cfg.output_dir = (dir / "a").string();
  const OutputSeries a = run(cfg);
  cfg.output_dir = (dir / "b").string();
  const OutputSeries b = run(cfg);

  bool monotone = true;
  for (std::size_t k = 1; k < a.records.size(); ++k) {
    monotone = monotone && a.records[k].v_omega >= a.records[k - 1].v_omega &&
               a.records[k].length >= a.records[k - 1].length;
  }
  o.check(monotone, "V_omega and L nondecreasing");
  o.check(a.records.back().length > a.records.front().length, "network grew (L " + fmt(a.records.front().length) +
                                                                  " -> " + fmt(a.records.back().length) + ")");

  Simulation sim(cfg);
  while (!sim.finished()) sim.advance();
  const double l_e = GrowthParameters::from(cfg.params).l_e;
  int appended = 0;
  bool long_enough = true;
  for (const auto& s : sim.state().net.segments()) {
    if (s.birth_time > 0.0) {
      ++appended;
      long_enough = long_enough && s.length >= l_e * (1.0 - 1e-12);
    }
  }
  o.check(long_enough, std::to_string(appended) + " appended segments >= l_e");

  o.check(slurp(dir / "a" / "series.csv") == slurp(dir / "b" / "series.csv"), "identical series.csv");
  o.check(slurp(dir / "a" / "events.csv") == slurp(dir / "b" / "events.csv"), "identical events.csv");

  cfg.output_dir = (dir / "restart").string();
  RunOptions opts;
  opts.restart = dir / "a" / "checkpoint_0008.bin";
  bool restart_ok = std::filesystem::exists(*opts.restart);
  if (restart_ok) {
    const OutputSeries r = run(cfg, opts);
    restart_ok = r.records == a.records &&
                 slurp(dir / "restart" / "series.csv") == slurp(dir / "a" / "series.csv");
  }
  o.check(restart_ok, "restart from step 8 bitwise identical");
}

void desk_morris(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const InputSpace space = parse_space("tumor.gamma uniform 1.16e-2 3.46e-2\nvegf.G uniform 0.25 1\n"
                                       "growth.tau uniform 12 48\np = 4\n");
  SimulationConfig base = make_config("mesh = cube:7\nT = 5 d\nseed = 2\n");
  const TetMesh mesh = build_mesh(base);
  o.detail << "3D dofs " << mesh.num_nodes() << "; ";
  CampaignSettings s;
  s.R = 100;
  s.r = 10;
  s.seed = 11;
  s.outputs = {"P_phi", "C_avg", "rho_net", "V_omega"};
  s.times = {24.0, 72.0, 120.0};
  const auto res = run_campaign(space, base.params, s, simulation_model(base, s.outputs, s.times));
  const auto dir = fixtures::scratch_dir("acceptance_morris");
  write_report(dir, space, res);

  int failed = 0;
  for (const auto& r : res.runs) failed += !r.values.has_value();
  o.check(res.runs.size() == 40 && failed == 0, std::to_string(res.runs.size()) + " runs, " +
                                                    std::to_string(failed) + " failed");
  bool finite = true;
  for (const auto& per_output : res.summary.stats) {
    for (const auto& per_time : per_output) {
      for (const auto& st : per_time) finite = finite && std::isfinite(st.mu_star) && st.sigma.has_value() &&
                                               std::isfinite(*st.sigma) && st.count == 10;
    }
  }
  o.check(finite, "finite mu* and sigma from 10 effects each");

  std::ifstream summary(dir / "summary.csv");
  std::string header;
  std::getline(summary, header);
  int rows = 0;
  for (std::string line; std::getline(summary, line);) ++rows;
  o.check(header == "output,input,time_h,mu_star,sigma,mu_star_norm,sigma_norm,effects,missing" && rows == 4 * 3 * 3,
          "summary.csv with " + std::to_string(rows) + " rows");

  Rng r1(s.seed);
  Rng r2(s.seed);
  const auto sel1 = select_spread(generate_trajectories(space, s.R, r1), s.r);
  const auto sel2 = select_spread(generate_trajectories(space, s.R, r2), s.r);
  o.check(sel1 == sel2 && sel1 == res.selected, "selection reproducible");
  const double wall = seconds_since(t0);
  o.check(wall < 600.0, "runtime " + fmt(wall) + " s < 600 s");
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {1, {"FEM convergence", fem_convergence}},
      {2, {"1D Poiseuille exactness", poiseuille}},
      {3, {"coupling oracle equivalence", coupling_oracle}},
      {4, {"Newton verification", newton_verification}},
      {5, {"wall exchange conservation", conservation}},
      {6, {"closed-form anchors", anchors}},
      {7, {"Morris oracles", morris_oracles}},
      {8, {"set 1 vs set 2 tumor fraction", set_ordering}},
      {9, {"branching age ordering", branching_ordering}},
      {10, {"structural invariants", structural_invariants}},
      {11, {"desk-scale Morris campaign", desk_morris}},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int k = std::atoi(argv[i]);
    if (!criteria.count(k)) {
      std::cerr << "unknown criterion '" << argv[i] << "'\n";
      return 2;
    }
    selected.push_back(k);
  }
  if (selected.empty()) {
    for (const auto& [k, _] : criteria) selected.push_back(k);
  }
  bool all = true;
  for (int k : selected) {
    const auto& [name, fn] = criteria.at(k);
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    all = all && o.pass;
    std::cout << "criterion " << k << " " << (o.pass ? "PASS" : "FAIL") << " [" << name << "] " << o.detail.str()
              << "(" << fmt(seconds_since(t0)) << " s)" << std::endl;
  }
  return all ? 0 : 1;
}
