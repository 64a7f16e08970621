#pragma once

#include "angio/config.hpp"
#include "angio/simulation.hpp"

#include <filesystem>

namespace angio {

inline constexpr std::uint32_t kStateFormatVersion = 1;

/// Writes <base>.bin (little-endian binary) and <base>.json (manifest).
void save_state(const std::filesystem::path& base, const SimulationState& state, const SimulationConfig& config);

/// Reads <base>.bin; the manifest is informational. `base` may also name the
/// .bin file directly.
SimulationState load_state(const std::filesystem::path& base);

}  // namespace angio
