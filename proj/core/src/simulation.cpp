#include "angio/simulation.hpp"

#include "angio/flow.hpp"
#include "angio/line_quadrature.hpp"
#include "angio/state_io.hpp"
#include "angio/tissue.hpp"
#include "angio/transport.hpp"
#include "angio/vtk.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace angio {

std::vector<std::string> series_columns() {
  return {"step",
          "time_h",
          "P_phi",
          "C_avg",
          "rho_net",
          "V_omega",
          "tips",
          "length_mm",
          "mean_phi",
          "segments",
          "dofs_1d",
          "events",
          "newton_iterations",
          "newton_substeps",
          "newton_residual",
          "pressure_cost",
          "pressure_residual",
          "pressure_source_3d",
          "pressure_sink_1d",
          "pressure_lymphatic",
          "pressure_storage",
          "pressure_growth",
          "oxygen_cost",
          "oxygen_residual",
          "oxygen_source_3d",
          "oxygen_sink_1d"};
}

double record_value(const StepRecord& r, const std::string& column) {
  const std::vector<double> v = {static_cast<double>(r.step),
                                 r.time,
                                 r.p_phi,
                                 r.c_avg,
                                 r.rho_net,
                                 r.v_omega,
                                 static_cast<double>(r.tips),
                                 r.length,
                                 r.mean_phi,
                                 static_cast<double>(r.segments),
                                 static_cast<double>(r.dofs_1d),
                                 static_cast<double>(r.events),
                                 static_cast<double>(r.newton_iterations),
                                 static_cast<double>(r.newton_substeps),
                                 r.newton_residual,
                                 r.pressure_cost,
                                 r.pressure_residual,
                                 r.pressure_source_3d,
                                 r.pressure_sink_1d,
                                 r.pressure_lymphatic,
                                 r.pressure_storage,
                                 r.pressure_growth,
                                 r.oxygen_cost,
                                 r.oxygen_residual,
                                 r.oxygen_source_3d,
                                 r.oxygen_sink_1d};
  const auto cols = series_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (cols[i] == column) {
      return v[i];
    }
  }
  std::string known;
  for (const auto& c : cols) {
    known += (known.empty() ? "" : ", ") + c;
  }
  throw InputError("unknown output '" + column + "'; available: " + known);
}

std::string series_row(const StepRecord& r) {
  std::ostringstream os;
  os.precision(17);
  os << r.step << ',' << r.time << ',' << r.p_phi << ',' << r.c_avg << ',' << r.rho_net << ',' << r.v_omega << ','
     << r.tips << ',' << r.length << ',' << r.mean_phi << ',' << r.segments << ',' << r.dofs_1d << ',' << r.events
     << ',' << r.newton_iterations << ',' << r.newton_substeps << ',' << r.newton_residual << ','
     << r.pressure_cost << ',' << r.pressure_residual << ',' << r.pressure_source_3d << ',' << r.pressure_sink_1d
     << ',' << r.pressure_lymphatic << ',' << r.pressure_storage << ',' << r.pressure_growth << ','
     << r.oxygen_cost << ',' << r.oxygen_residual << ',' << r.oxygen_source_3d << ',' << r.oxygen_sink_1d;
  return os.str();
}

namespace {

std::string header_line() {
  std::string h;
  for (const auto& c : series_columns()) {
    h += (h.empty() ? "" : ",") + c;
  }
  return h;
}

}  // namespace

void write_series_csv(const std::filesystem::path& path, const OutputSeries& series) {
  std::ofstream out(path);
  if (!out) {
    throw InputError("cannot write " + path.string());
  }
  out << header_line() << '\n';
  for (const auto& r : series.records) {
    out << series_row(r) << '\n';
  }
}

TetMesh build_mesh(const SimulationConfig& config) {
  if (config.mesh.rfind("cube:", 0) == 0) {
    const std::string n = config.mesh.substr(5);
    int cells = 0;
    try {
      cells = std::stoi(n);
    } catch (const std::exception&) {
      throw InputError("run.mesh: cannot read cell count in '" + config.mesh + "'");
    }
    if (cells < 1) {
      throw InputError("run.mesh: cube needs at least one cell per side");
    }
    return make_cube_mesh(cells, config.params.edge);
  }
  return load_mesh(config.mesh);
}

namespace {

NodalField read_nodal(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot read initial field " + path);
  }
  std::vector<double> v;
  double x = 0.0;
  while (in >> x) {
    v.push_back(x);
  }
  if (static_cast<int>(v.size()) != n) {
    throw InputError("initial field " + path + " has " + std::to_string(v.size()) + " values, the mesh has " +
                     std::to_string(n) + " nodes");
  }
  return Eigen::Map<NodalField>(v.data(), n);
}

NodalField initial_nodal(const InitialField& f, int n) {
  if (f.kind == InitialField::Kind::file) {
    return read_nodal(f.path, n);
  }
  return NodalField::Constant(n, f.value);
}

// Values of a tissue field at the auxiliary partition nodes.
Vector aux_trace(const VesselNetwork& net, const TetMesh& mesh, const NodalField& field) {
  Vector out(net.num_aux_dofs());
  for (int si = 0; si < net.num_segments(); ++si) {
    const Segment& s = net.segments()[static_cast<std::size_t>(si)];
    for (int i = 0; i < s.aux_nodes; ++i) {
      out[s.aux_offset + i] = mesh.evaluate(field, net.point(si, static_cast<double>(i) / (s.aux_nodes - 1)));
    }
  }
  return out;
}

struct Previous1D {
  Vector p_hat;
  Vector c_hat;
  Vector psi;
  Vector theta;
};

// Carries 1D history onto the current partitions. Old segments keep their
// values; new segments start from the pressure of their first junction,
// zero oxygen, and auxiliary traces of the previous tissue fields.
Previous1D map_history(const VesselNetwork& net, const TetMesh& mesh, const std::vector<SegmentHistory>& history,
                       const NodalField& p, const NodalField& c) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Previous1D out;
  out.p_hat = Vector::Constant(net.num_dofs(), nan);
  out.c_hat = Vector::Constant(net.num_dofs(), nan);
  out.psi = aux_trace(net, mesh, p);
  out.theta = aux_trace(net, mesh, c);
  const std::size_t old = history.size();
  for (std::size_t si = 0; si < old; ++si) {
    const Segment& s = net.segments()[si];
    const SegmentHistory& h = history[si];
    for (std::size_t i = 0; i < s.dofs.size(); ++i) {
      out.p_hat[s.dofs[i]] = h.p_hat[i];
      out.c_hat[s.dofs[i]] = h.c_hat[i];
    }
    for (int i = 0; i < s.aux_nodes; ++i) {
      out.psi[s.aux_offset + i] = h.psi[static_cast<std::size_t>(i)];
      out.theta[s.aux_offset + i] = h.theta[static_cast<std::size_t>(i)];
    }
  }
  for (std::size_t si = old; si < net.segments().size(); ++si) {
    const Segment& s = net.segments()[si];
    double start = out.p_hat[s.dofs.front()];
    if (std::isnan(start)) {
      start = mesh.evaluate(p, net.point(static_cast<int>(si), 0.0));
    }
    for (int d : s.dofs) {
      if (std::isnan(out.p_hat[d])) {
        out.p_hat[d] = start;
      }
      if (std::isnan(out.c_hat[d])) {
        out.c_hat[d] = 0.0;
      }
    }
  }
  return out;
}

}  // namespace

StepRecord compute_outputs(const SimulationState& state, const TetMesh& mesh, const NodalField& phil) {
  StepRecord r;
  r.step = state.step;
  r.time = state.time;
  const double mass = integrate(mesh, state.phi);
  r.p_phi = state.step == 0 ? 0.0 : (mass - state.phi0_integral) / state.phi0_integral;
  r.c_avg = integrate_product(mesh, phil, state.c) / mesh.total_volume();
  const NetworkStats stats = network_stats(state.net, mesh);
  r.rho_net = stats.density;
  r.v_omega = stats.covered_fraction;
  r.tips = stats.tips;
  r.length = stats.length;
  r.mean_phi = mass / mesh.total_volume();
  r.segments = state.net.num_segments();
  r.dofs_1d = state.net.num_dofs();
  return r;
}

Simulation::Simulation(SimulationConfig config)
    : config_(std::move(config)), mesh_(build_mesh(config_)) {
  ecm_ = build_ecm(mesh_, config_.effective_ecm_seed(), config_.ecm_perturbation);
  initialize();
}

Simulation::Simulation(SimulationConfig config, SimulationState state)
    : config_(std::move(config)), mesh_(build_mesh(config_)), state_(std::move(state)) {
  ecm_ = build_ecm(mesh_, config_.effective_ecm_seed(), config_.ecm_perturbation);
  const int n = mesh_.num_nodes();
  if (state_.phi.size() != n || state_.p.size() != n || state_.c.size() != n || state_.g.size() != n) {
    throw InputError("saved state does not match the mesh of the config");
  }
  if (static_cast<int>(state_.history.size()) != state_.net.num_segments()) {
    throw InputError("saved state: 1D history does not match the network");
  }
  build_partitions(state_.net, mesh_, config_.partition_density);
  velocity_ = tissue_velocity(mesh_, state_.p, update_phil(TumorConstitutive::from(config_.params), state_.phi),
                              FlowParameters::from(config_.params));
}

void Simulation::store_history(const Vector& p_hat, const Vector& c_hat, const Vector& psi, const Vector& theta) {
  const auto ph = split_by_segment(state_.net, p_hat);
  const auto ch = split_by_segment(state_.net, c_hat);
  const auto ps = split_aux_by_segment(state_.net, psi);
  const auto th = split_aux_by_segment(state_.net, theta);
  state_.history.resize(ph.size());
  for (std::size_t i = 0; i < ph.size(); ++i) {
    state_.history[i] = {ph[i], ch[i], ps[i], th[i]};
  }
}

void Simulation::initialize() {
  const ParameterSet& prm = config_.params;
  const TumorConstitutive tc = TumorConstitutive::from(prm);
  tc.validate();
  GrowthParameters::from(prm).validate();
  const FlowParameters fp = FlowParameters::from(prm);
  const TransportParameters tp = config_.transport();
  const int n = mesh_.num_nodes();

  state_ = SimulationState{};
  state_.rng = Rng(config_.seed);
  state_.net = load_network(config_.network, prm.radius);
  state_.phi = initial_nodal(config_.phi, n);
  if (state_.phi.minCoeff() <= 0.0 || state_.phi.maxCoeff() >= tc.phi_max) {
    throw InputError("initial tumor fraction must lie in (0, phi_max)");
  }
  state_.phi0_integral = integrate(mesh_, state_.phi);
  if (!(state_.phi0_integral > 0.0)) {
    throw InputError("initial tumor mass is zero");
  }
  state_.g = initial_nodal(config_.vegf, n);

  build_partitions(state_.net, mesh_, config_.partition_density);
  const LineQuadrature quad(mesh_, state_.net);
  const NodalField phil = update_phil(tc, state_.phi);
  StepRecord diag;

  Vector p_hat;
  Vector psi;
  std::vector<std::vector<double>> vessel_v;
  if (config_.pressure.kind == InitialField::Kind::presolve) {
    PressureInputs pin;
    const NodalField zero = NodalField::Zero(n);
    pin.phi = &state_.phi;
    pin.phil = &phil;
    pin.phil_prev = &phil;
    pin.oxygen_prev = &zero;
    pin.p_hat_prev = Vector::Constant(state_.net.num_dofs(), 0.5 * (fp.p_in + fp.p_out));
    pin.psi_omega_prev = Vector::Constant(state_.net.num_aux_dofs(), fp.p_ls);
    pin.dt = config_.dt;
    pin.storage = false;
    pin.growth_sink = false;
    pin.case_iterations = config_.presolve_case_iterations;
    const PressureResult pr = pressure_step(mesh_, state_.net, quad, fp, tc, pin);
    state_.p = pr.p;
    p_hat = pr.p_hat;
    psi = pr.psi_omega;
    velocity_ = pr.velocity;
    vessel_v = pr.vessel_velocity;
    diag.pressure_cost = pr.cost;
    diag.pressure_residual = pr.residual;
    diag.pressure_source_3d = pr.source_3d;
    diag.pressure_sink_1d = pr.sink_1d;
    diag.pressure_lymphatic = pr.lymphatic;
  } else {
    state_.p = initial_nodal(config_.pressure, n);
    p_hat = trace_operator(state_.net, mesh_) * state_.p;
    for (int d : state_.net.dofs_of_kind(JunctionKind::inlet)) p_hat[d] = fp.p_in;
    for (int d : state_.net.dofs_of_kind(JunctionKind::outlet)) p_hat[d] = fp.p_out;
    psi = aux_trace(state_.net, mesh_, state_.p);
    velocity_ = tissue_velocity(mesh_, state_.p, phil, fp);
    vessel_v = vessel_velocity(state_.net, p_hat, fp);
  }

  Vector c_hat;
  Vector theta;
  if (config_.oxygen.kind == InitialField::Kind::presolve) {
    const NodalField zero = NodalField::Zero(n);
    OxygenInputs oin;
    oin.c_prev = &zero;
    oin.phil = &phil;
    oin.velocity = velocity_;
    oin.vessel_velocity = &vessel_v;
    oin.c_hat_prev = Vector::Constant(state_.net.num_dofs(), tp.c_in);
    oin.theta_omega_prev = Vector::Zero(state_.net.num_aux_dofs());
    oin.dt = config_.dt;
    oin.steady = true;
    oin.case_iterations = config_.presolve_case_iterations;
    const OxygenResult orr = oxygen_step(mesh_, state_.net, quad, tp, oin);
    state_.c = orr.c;
    c_hat = orr.c_hat;
    theta = orr.theta_omega;
    diag.oxygen_cost = orr.cost;
    diag.oxygen_residual = orr.residual;
    diag.oxygen_source_3d = orr.source_3d;
    diag.oxygen_sink_1d = orr.sink_1d;
  } else {
    state_.c = initial_nodal(config_.oxygen, n);
    c_hat = trace_operator(state_.net, mesh_) * state_.c;
    theta = aux_trace(state_.net, mesh_, state_.c);
  }
  store_history(p_hat, c_hat, psi, theta);

  StepRecord r = compute_outputs(state_, mesh_, phil);
  r.pressure_cost = diag.pressure_cost;
  r.pressure_residual = diag.pressure_residual;
  r.pressure_source_3d = diag.pressure_source_3d;
  r.pressure_sink_1d = diag.pressure_sink_1d;
  r.pressure_lymphatic = diag.pressure_lymphatic;
  r.oxygen_cost = diag.oxygen_cost;
  r.oxygen_residual = diag.oxygen_residual;
  r.oxygen_source_3d = diag.oxygen_source_3d;
  r.oxygen_sink_1d = diag.oxygen_sink_1d;
  state_.records.push_back(r);
}

const StepRecord& Simulation::advance() {
  if (finished()) {
    throw InputError("simulation already reached the final time");
  }
  const ParameterSet& prm = config_.params;
  const TumorConstitutive tc = TumorConstitutive::from(prm);
  const FlowParameters fp = FlowParameters::from(prm);
  const TransportParameters tp = config_.transport();
  const GrowthParameters gp = GrowthParameters::from(prm);
  const double dt = config_.dt;
  const double t = (state_.step + 1) * dt;

  // Work on copies so that a failure leaves the last completed step intact.
  VesselNetwork net = state_.net;
  Rng rng = state_.rng;
  const auto events = advance_tips(net, mesh_, state_.g, ecm_, dt, t, gp, rng);
  build_partitions(net, mesh_, config_.partition_density);
  const LineQuadrature quad(mesh_, net);
  const Previous1D prev = map_history(net, mesh_, state_.history, state_.p, state_.c);

  const TumorStepResult tumor = tumor_step(mesh_, tc, state_.phi, state_.c, dt, config_.newton());
  const NodalField phil_prev = update_phil(tc, state_.phi);
  const NodalField phil = update_phil(tc, tumor.phi);

  PressureInputs pin;
  pin.phi = &tumor.phi;
  pin.phil = &phil;
  pin.phil_prev = &phil_prev;
  pin.oxygen_prev = &state_.c;
  pin.p_hat_prev = prev.p_hat;
  pin.psi_omega_prev = prev.psi;
  pin.dt = dt;
  pin.case_iterations = config_.case_iterations;
  const PressureResult pr = pressure_step(mesh_, net, quad, fp, tc, pin);

  OxygenInputs oin;
  oin.c_prev = &state_.c;
  oin.phil = &phil;
  oin.velocity = pr.velocity;
  oin.vessel_velocity = &pr.vessel_velocity;
  oin.c_hat_prev = prev.c_hat;
  oin.theta_omega_prev = prev.theta;
  oin.dt = dt;
  oin.case_iterations = config_.case_iterations;
  const OxygenResult orr = oxygen_step(mesh_, net, quad, tp, oin);

  VegfInputs vin;
  vin.g_prev = &state_.g;
  vin.phi = &tumor.phi;
  vin.phil = &phil;
  vin.oxygen = &orr.c;
  vin.velocity = pr.velocity;
  vin.dt = dt;
  NodalField g = vegf_step(mesh_, &quad, tp, vin);

  state_.net = std::move(net);
  state_.rng = rng;
  state_.step += 1;
  state_.time = t;
  state_.phi = tumor.phi;
  state_.p = pr.p;
  state_.c = orr.c;
  state_.g = std::move(g);
  state_.events.insert(state_.events.end(), events.begin(), events.end());
  store_history(pr.p_hat, orr.c_hat, pr.psi_omega, orr.theta_omega);
  velocity_ = pr.velocity;

  StepRecord r = compute_outputs(state_, mesh_, phil);
  r.events = static_cast<int>(events.size());
  r.newton_iterations = tumor.iterations;
  r.newton_substeps = tumor.substeps;
  r.newton_residual = tumor.residual;
  r.pressure_cost = pr.cost;
  r.pressure_residual = pr.residual;
  r.pressure_source_3d = pr.source_3d;
  r.pressure_sink_1d = pr.sink_1d;
  r.pressure_lymphatic = pr.lymphatic;
  r.pressure_storage = pr.storage;
  r.pressure_growth = pr.growth;
  r.oxygen_cost = orr.cost;
  r.oxygen_residual = orr.residual;
  r.oxygen_source_3d = orr.source_3d;
  r.oxygen_sink_1d = orr.sink_1d;
  state_.records.push_back(r);
  return state_.records.back();
}

namespace {

std::string numbered(const std::string& stem, int step, const std::string& ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%04d", step);
  return stem + buf + ext;
}

void write_snapshot(const std::filesystem::path& dir, const Simulation& sim) {
  const SimulationState& s = sim.state();
  const NodalField phil = update_phil(TumorConstitutive::from(sim.config().params), s.phi);
  write_vtk(dir / numbered("fields", s.step, ".vtk"), sim.mesh(),
            {{"phi_c", &s.phi}, {"phi_l", &phil}, {"pressure", &s.p}, {"oxygen", &s.c}, {"vegf", &s.g}},
            {{"velocity", &sim.velocity()}});
  write_vtk_network(dir / numbered("network", s.step, ".vtk"), s.net);
}

template <typename E>
[[noreturn]] void rethrow_at(const E& e, int step) {
  throw E("step " + std::to_string(step) + ": " + e.what());
}

}  // namespace

OutputSeries run(const SimulationConfig& config, const RunOptions& options) {
  std::optional<Simulation> sim;
  if (options.restart) {
    sim.emplace(config, load_state(*options.restart));
  } else {
    sim.emplace(config);
  }
  const std::filesystem::path dir(config.output_dir);
  std::ofstream series;
  if (options.write_files) {
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "config.txt") << serialize_config(config);
    series.open(dir / "series.csv");
    if (!series) {
      throw InputError("cannot write " + (dir / "series.csv").string());
    }
    series << header_line() << '\n';
    for (const auto& r : sim->state().records) {
      series << series_row(r) << '\n';
    }
    series.flush();
    if (!options.restart && config.vtk_every > 0) {
      write_snapshot(dir, *sim);
    }
  }
  if (options.on_step && !options.restart) {
    options.on_step(sim->state().records.back());
  }

  while (!sim->finished()) {
    const int step = sim->state().step + 1;
    try {
      const StepRecord& r = sim->advance();
      if (options.on_step) {
        options.on_step(r);
      }
    } catch (const Error& e) {
      if (options.write_files) {
        try {
          save_state(dir / "failure_state", sim->state(), config);
          write_event_log((dir / "events.csv").string(), sim->state().events);
        } catch (const Error&) {
        }
      }
      if (dynamic_cast<const NumericalError*>(&e)) {
        rethrow_at(static_cast<const NumericalError&>(e), step);
      }
      if (dynamic_cast<const InputError*>(&e)) {
        rethrow_at(static_cast<const InputError&>(e), step);
      }
      rethrow_at(e, step);
    }
    if (options.write_files) {
      series << series_row(sim->state().records.back()) << '\n';
      series.flush();
      if (config.vtk_every > 0 && step % config.vtk_every == 0) {
        write_snapshot(dir, *sim);
      }
      if (config.checkpoint_every > 0 && step % config.checkpoint_every == 0) {
        save_state(dir / numbered("checkpoint", step, ""), sim->state(), config);
      }
    }
  }
  if (options.write_files) {
    write_event_log((dir / "events.csv").string(), sim->state().events);
  }
  return OutputSeries{sim->state().records};
}

}  // namespace angio
