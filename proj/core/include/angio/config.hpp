#pragma once

#include "angio/common.hpp"
#include "angio/parameters.hpp"
#include "angio/tissue.hpp"
#include "angio/transport.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace angio {

/// Initial value of a tissue field: a constant, a file with one nodal value
/// per line, or a steady pre-solve on the initial network.
struct InitialField {
  enum class Kind { constant, file, presolve };
  Kind kind = Kind::constant;
  double value = 0.0;
  std::string path;

  bool operator==(const InitialField&) const = default;
};

struct SimulationConfig {
  std::string mesh;     // file path or "cube:N"
  std::string network;  // file path
  std::string preset;   // empty when none
  ParameterSet params;

  double final_time = 0.0;  // h
  double dt = 6.0;          // h
  std::uint64_t seed = 1;
  int vtk_every = 4;   // steps between VTK snapshots, 0 disables
  int checkpoint_every = 0;
  std::string output_dir = "out";

  InitialField phi{InitialField::Kind::constant, 0.5, {}};
  InitialField pressure{InitialField::Kind::presolve, 0.0, {}};
  InitialField oxygen{InitialField::Kind::presolve, 0.0, {}};
  InitialField vegf{InitialField::Kind::constant, 0.0, {}};

  double partition_density = 1.0;
  double ecm_perturbation = 0.2;
  std::uint64_t ecm_seed = 0;  // 0: derived from seed
  OutletCondition outlet = OutletCondition::zero_flux;
  bool artificial_diffusion = false;
  int case_iterations = 1;
  int presolve_case_iterations = 8;
  int newton_max_iterations = 30;
  int newton_max_halvings = 8;

  bool operator==(const SimulationConfig&) const = default;

  NewtonSettings newton() const;
  TransportParameters transport() const;
  std::uint64_t effective_ecm_seed() const;
  int num_steps() const;
};

struct ParsedConfig {
  SimulationConfig config;
  std::vector<std::string> warnings;
};

/// Thrown with every diagnostic collected during validation.
class ConfigError : public InputError {
 public:
  explicit ConfigError(std::vector<std::string> diagnostics);
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

/// Parses "[section]" headers and "key = value [unit]" lines ('#' starts a
/// comment). Relative file paths are resolved against base_dir. Values of a
/// preset named in [run] are applied before the explicit keys.
ParsedConfig validate_config(const std::string& text, const std::filesystem::path& base_dir = {});

ParsedConfig load_config(const std::filesystem::path& path);

/// Text that validate_config maps back to an identical config.
std::string serialize_config(const SimulationConfig& config);

/// Keys accepted outside the parameter table.
std::vector<std::string> config_keys();
std::vector<std::string> required_config_keys();

}  // namespace angio
