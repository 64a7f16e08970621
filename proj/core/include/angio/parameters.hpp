#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace angio {

namespace units {
inline constexpr double kPascalPerMmHg = 133.322368;
inline constexpr double kSecondsPerHour = 3600.0;
/// 1 mmHg expressed in kg / (mm h^2).
inline constexpr double kMmHgMassUnits = kPascalPerMmHg * kSecondsPerHour * kSecondsPerHour / 1000.0;
}  // namespace units

/// Physical constants in the internal unit system: mm, h, mmHg. VEGF
/// concentrations are in units of 1e-13 kg/mm^3.
struct ParameterSet {
  // geometry
  double edge = 2.5;     // cube edge L (mm)
  double radius = 5e-3;  // vessel radius R (mm)

  // tumor cells
  double motility = 1e-4 * units::kSecondsPerHour * units::kPascalPerMmHg / 1e6;  // M (mm^2 / (mmHg h))
  double young = 10e3 / units::kPascalPerMmHg;       // E (mmHg)
  double phi_max = 1.0;
  double phi_0 = 0.5;
  double gamma = 1.93e-2;  // 1/h
  double c_ref = 10.5;     // mmHg

  // pressure
  double beta_p0 = 2.78e-10 * units::kMmHgMassUnits; // mm / (mmHg h)
  double dp_onc = 25.0;        // mmHg
  double beta_ls = 0.5;        // 1 / (mmHg h)
  double p_ls = 0.0;           // mmHg
  double mu = 4e-3 / units::kPascalPerMmHg / units::kSecondsPerHour; // mmHg h
  double p_in = 33.75;         // mmHg
  double p_out = 35.0;         // mmHg
  double r_p = 21.38;
  double kappa = 3.22e-9;  // mm^2

  // oxygen
  double beta_c0 = 12.6;     // mm/h
  double d_c = 4.86;         // mm^2/h
  double d_c_vessel = 1.8e3; // mm^2/h
  double c_in = 95.0;        // mmHg
  double r_c = 1.0;
  double m_c = 0.55;  // 1/h

  // VEGF
  double d_g = 0.18;  // mm^2/h
  double sigma = 0.5; // 1/h
  double c_star = 11.5;
  double b = 11.5;
  double sigma_tilde = 1.4;  // 1/h
  double production = 1.0;   // G (1/h)

  // capillary growth
  double g_lim = 0.25;
  double g_bar = 1.0;
  double l_e = 0.04;  // mm
  double alpha_br = 0.3;
  double d_br = 0.04;    // mm
  double tau_br = 48.0;  // h
  double g_br = 1.5;
  double tau = 36.0;  // h

  bool operator==(const ParameterSet&) const = default;
};

/// Unit conversion into the internal system for one physical dimension.
enum class Dimension {
  none,
  length,
  area,
  time,
  rate,
  pressure,
  inverse_pressure_rate,
  viscosity,
  diffusivity,
  motility,
  wall_hydraulic,
  velocity,
  vegf,
};

/// Factor that converts a value written in `unit` to the internal unit of
/// `dim`; nullopt when the unit is unknown or of another dimension.
std::optional<double> unit_factor(Dimension dim, const std::string& unit);

/// Units accepted for a dimension (first entry is the default written unit).
std::vector<std::string> accepted_units(Dimension dim);

struct ParameterInfo {
  std::string key;          // "section.name"
  double ParameterSet::*field;
  Dimension dim;
  std::string unit;         // unit assumed when the value carries none
  std::string description;
  std::optional<double> min;  // range in the written unit, warn outside
  std::optional<double> max;
};

/// Every physical constant with its config key and documented range.
const std::vector<ParameterInfo>& parameter_table();

const ParameterInfo* find_parameter(const std::string& key);

/// Value of a field converted to its written unit.
double written_value(const ParameterSet& p, const ParameterInfo& info);

}  // namespace angio
