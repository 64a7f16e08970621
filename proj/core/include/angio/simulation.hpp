#pragma once

#include "angio/angiogenesis.hpp"
#include "angio/common.hpp"
#include "angio/config.hpp"
#include "angio/mesh.hpp"
#include "angio/vessel_network.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace angio {

/// Outputs and solver diagnostics of one time level.
struct StepRecord {
  int step = 0;
  double time = 0.0;     // h
  double p_phi = 0.0;    // relative tumor mass increase
  double c_avg = 0.0;    // (1/|Omega|) int phil c dx
  double rho_net = 0.0;  // L / N_tips, +inf without tips
  double v_omega = 0.0;  // fraction of tets crossed by the network
  int tips = 0;
  double length = 0.0;
  double mean_phi = 0.0;
  int segments = 0;
  int dofs_1d = 0;
  int events = 0;
  int newton_iterations = 0;
  int newton_substeps = 0;
  double newton_residual = 0.0;
  double pressure_cost = 0.0;
  double pressure_residual = 0.0;
  double pressure_source_3d = 0.0;
  double pressure_sink_1d = 0.0;
  double pressure_lymphatic = 0.0;
  double pressure_storage = 0.0;
  double pressure_growth = 0.0;
  double oxygen_cost = 0.0;
  double oxygen_residual = 0.0;
  double oxygen_source_3d = 0.0;
  double oxygen_sink_1d = 0.0;

  bool operator==(const StepRecord&) const = default;
};

struct OutputSeries {
  std::vector<StepRecord> records;
};

std::vector<std::string> series_columns();
/// Value of a named column; throws InputError listing the columns.
double record_value(const StepRecord& r, const std::string& column);
std::string series_row(const StepRecord& r);
void write_series_csv(const std::filesystem::path& path, const OutputSeries& series);

/// 1D unknowns of one segment, ordered along its partitions.
struct SegmentHistory {
  std::vector<double> p_hat;
  std::vector<double> c_hat;
  std::vector<double> psi;    // auxiliary tissue pressure
  std::vector<double> theta;  // auxiliary tissue oxygen
};

/// Everything a run needs to continue from a time level.
struct SimulationState {
  int step = 0;
  double time = 0.0;
  NodalField phi;
  NodalField p;
  NodalField c;
  NodalField g;
  double phi0_integral = 0.0;
  VesselNetwork net;
  std::vector<SegmentHistory> history;  // one entry per segment of net
  Rng rng;
  std::vector<GrowthEvent> events;
  std::vector<StepRecord> records;
};

/// Tissue mesh named by the config: "cube:N" or a mesh file.
TetMesh build_mesh(const SimulationConfig& config);

/// Output record of a state. phil is the liquid fraction of state.phi.
StepRecord compute_outputs(const SimulationState& state, const TetMesh& mesh, const NodalField& phil);

class Simulation {
 public:
  /// Loads mesh and network and computes the initial state.
  explicit Simulation(SimulationConfig config);
  /// Resumes from a saved state.
  Simulation(SimulationConfig config, SimulationState state);

  /// Advances one step and returns its record. On failure the state is left
  /// at the last completed step.
  const StepRecord& advance();
  bool finished() const { return state_.step >= config_.num_steps(); }

  const SimulationConfig& config() const { return config_; }
  const SimulationState& state() const { return state_; }
  const TetMesh& mesh() const { return mesh_; }
  const EcmField& ecm() const { return ecm_; }
  /// Tissue velocity of the last pressure solve, per tet.
  const std::vector<Vec3>& velocity() const { return velocity_; }

 private:
  void initialize();
  void store_history(const Vector& p_hat, const Vector& c_hat, const Vector& psi, const Vector& theta);

  SimulationConfig config_;
  TetMesh mesh_;
  EcmField ecm_;
  SimulationState state_;
  std::vector<Vec3> velocity_;
};

struct RunOptions {
  bool write_files = true;
  std::optional<std::filesystem::path> restart;  // state file to resume from
  std::function<void(const StepRecord&)> on_step;
};

/// Full run. With write_files, the output directory receives series.csv,
/// events.csv, config.txt, VTK snapshots and checkpoints; on a failing step a
/// state dump named failure_state is written before the error propagates
/// with the step index prepended.
OutputSeries run(const SimulationConfig& config, const RunOptions& options = {});

}  // namespace angio
