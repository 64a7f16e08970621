#pragma once

#include "angio/angiogenesis.hpp"
#include "angio/config.hpp"
#include "angio/parameters.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace angio {

enum class Distribution { uniform, log_uniform };

/// One varied input. Bounds are in the written unit of the parameter; with
/// relative_to set they are multiples of that parameter's (mapped) value.
struct InputSpec {
  std::string name;
  Distribution distribution = Distribution::uniform;
  double a = 0.0;
  double b = 1.0;
  std::string relative_to;
};

struct InputSpace {
  std::vector<InputSpec> inputs;
  int p = 4;

  int k() const { return static_cast<int>(inputs.size()); }
  /// Delta = p / (2 (p - 1)).
  double delta() const;
  /// Throws InputError unless p is even and >= 2 and a < b (0 < a for log-uniform).
  void validate() const;
};

/// Lines "name uniform|loguniform a b [relative_to KEY]" and an optional
/// "p = N" line; '#' starts a comment. Names must be parameter keys.
InputSpace parse_space(const std::string& text);
InputSpace load_space(const std::filesystem::path& path);

/// Space over the given parameter keys with their documented ranges.
InputSpace default_space(const std::vector<std::string>& names, int p = 4);

struct Trajectory {
  std::vector<std::vector<double>> points;  // K + 1 points in [0, 1]^K
  std::vector<int> order;                   // input varied between point m and m + 1
  std::vector<int> signs;                   // +1 or -1 per step
};

/// R trajectories from random admissible base levels, random input order and
/// random step signs.
std::vector<Trajectory> generate_trajectories(const InputSpace& space, int R, Rng& rng);

/// Sum over point pairs of Euclidean distances.
double trajectory_distance(const Trajectory& a, const Trajectory& b);

/// sqrt of the sum of squared pairwise distances of the chosen subset.
double spread(const std::vector<Trajectory>& all, const std::vector<int>& subset);

/// Indices (ascending) of r trajectories maximizing the spread. Exhaustive
/// when C(R, r) <= 1e5, otherwise greedy augmentation followed by pairwise
/// swaps until no swap improves.
std::vector<int> select_spread(const std::vector<Trajectory>& all, int r);

double map_unit(const InputSpec& input, double u);

/// Parameter overrides (written units) for a point of [0, 1]^K. Relative
/// bounds use the value of the reference parameter after the other inputs
/// were applied to `base`.
std::vector<std::pair<std::string, double>> map_to_physical(const std::vector<double>& point,
                                                            const InputSpace& space, const ParameterSet& base);

/// d for each input (indexed by input, not by step) from the model values
/// along a trajectory; absent where either run is missing or non-finite.
std::vector<std::optional<double>> elementary_effects(const Trajectory& t,
                                                      const std::vector<std::optional<double>>& y,
                                                      double delta);

struct EeStats {
  double mu_star = 0.0;
  std::optional<double> sigma;  // sample standard deviation, needs >= 2 effects
  int count = 0;
  int missing = 0;
};

EeStats summarize_effects(const std::vector<std::optional<double>>& effects);

struct EeSummary {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<double> times;  // h
  /// stats[output][time][input]
  std::vector<std::vector<std::vector<EeStats>>> stats;
  std::vector<double> mu_max;     // per output, over times and inputs
  std::vector<double> sigma_max;  // per output
};

/// Model evaluation: values[output][time] for the given overrides.
using ModelFn = std::function<std::vector<std::vector<double>>(const std::vector<std::pair<std::string, double>>&)>;

struct CampaignSettings {
  int R = 1000;
  int r = 50;
  std::uint64_t seed = 1;
  int workers = 1;
  std::vector<std::string> outputs;
  std::vector<double> times;  // h
};

struct CampaignRun {
  int trajectory = 0;  // position within the selection
  int point = 0;
  std::vector<std::pair<std::string, double>> overrides;
  std::optional<std::vector<std::vector<double>>> values;
  std::string error;
};

struct CampaignResult {
  std::vector<Trajectory> trajectories;  // all R
  std::vector<int> selected;
  std::vector<CampaignRun> runs;
  EeSummary summary;
};

/// Generates, selects and evaluates trajectories with up to `workers`
/// concurrent model calls; a throwing model call leaves its run missing.
CampaignResult run_campaign(const InputSpace& space, const ParameterSet& base, const CampaignSettings& settings,
                            const ModelFn& model);

/// Summary from a finished campaign.
EeSummary summarize_campaign(const InputSpace& space, const CampaignSettings& settings,
                             const std::vector<Trajectory>& selected, const std::vector<CampaignRun>& runs);

/// Model backed by full simulations of `base` with the overrides applied.
/// Outputs are StepRecord columns read at the step whose time is closest to
/// each report time.
ModelFn simulation_model(const SimulationConfig& base, const std::vector<std::string>& outputs,
                         const std::vector<double>& times);

/// Writes summary.csv, runs.csv, trajectories.csv and one SVG scatter per output.
void write_report(const std::filesystem::path& dir, const InputSpace& space, const CampaignResult& result);

}  // namespace angio
