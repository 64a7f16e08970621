#include "angio/parameters.hpp"

#include <algorithm>
#include <utility>

namespace angio {

namespace {

using units::kPascalPerMmHg;
using units::kSecondsPerHour;

struct UnitEntry {
  Dimension dim;
  const char* name;
  double factor;
};

const std::vector<UnitEntry>& unit_table() {
  static const std::vector<UnitEntry> table = {
      {Dimension::none, "", 1.0},
      {Dimension::none, "-", 1.0},
      {Dimension::length, "mm", 1.0},
      {Dimension::length, "um", 1e-3},
      {Dimension::length, "cm", 10.0},
      {Dimension::length, "m", 1e3},
      {Dimension::area, "mm2", 1.0},
      {Dimension::area, "um2", 1e-6},
      {Dimension::area, "cm2", 1e2},
      {Dimension::area, "m2", 1e6},
      {Dimension::time, "h", 1.0},
      {Dimension::time, "s", 1.0 / kSecondsPerHour},
      {Dimension::time, "min", 1.0 / 60.0},
      {Dimension::time, "d", 24.0},
      {Dimension::rate, "1/h", 1.0},
      {Dimension::rate, "1/s", kSecondsPerHour},
      {Dimension::rate, "1/min", 60.0},
      {Dimension::rate, "1/d", 1.0 / 24.0},
      {Dimension::pressure, "mmHg", 1.0},
      {Dimension::pressure, "Pa", 1.0 / kPascalPerMmHg},
      {Dimension::pressure, "kPa", 1e3 / kPascalPerMmHg},
      {Dimension::pressure, "MPa", 1e6 / kPascalPerMmHg},
      {Dimension::inverse_pressure_rate, "1/(mmHg*h)", 1.0},
      {Dimension::inverse_pressure_rate, "1/(Pa*s)", kPascalPerMmHg * kSecondsPerHour},
      {Dimension::viscosity, "Pa*s", 1.0 / (kPascalPerMmHg * kSecondsPerHour)},
      {Dimension::viscosity, "mPa*s", 1e-3 / (kPascalPerMmHg * kSecondsPerHour)},
      {Dimension::viscosity, "mmHg*h", 1.0},
      {Dimension::diffusivity, "mm2/h", 1.0},
      {Dimension::diffusivity, "mm2/s", kSecondsPerHour},
      {Dimension::diffusivity, "um2/s", 1e-6 * kSecondsPerHour},
      {Dimension::diffusivity, "cm2/s", 1e2 * kSecondsPerHour},
      {Dimension::motility, "mm2/(MPa*s)", kSecondsPerHour * kPascalPerMmHg / 1e6},
      {Dimension::motility, "mm2/(mmHg*h)", 1.0},
      {Dimension::wall_hydraulic, "mm2*h/kg", units::kMmHgMassUnits},
      {Dimension::wall_hydraulic, "mm/(mmHg*h)", 1.0},
      {Dimension::velocity, "mm/h", 1.0},
      {Dimension::velocity, "mm/s", kSecondsPerHour},
      {Dimension::velocity, "um/s", 1e-3 * kSecondsPerHour},
      {Dimension::velocity, "cm/s", 10.0 * kSecondsPerHour},
      {Dimension::vegf, "1e-13kg/mm3", 1.0},
      {Dimension::vegf, "kg/mm3", 1e13},
  };
  return table;
}

}  // namespace

std::optional<double> unit_factor(Dimension dim, const std::string& unit) {
  for (const auto& e : unit_table()) {
    if (e.dim == dim && unit == e.name) {
      return e.factor;
    }
  }
  return std::nullopt;
}

std::vector<std::string> accepted_units(Dimension dim) {
  std::vector<std::string> out;
  for (const auto& e : unit_table()) {
    if (e.dim == dim) {
      out.emplace_back(e.name);
    }
  }
  return out;
}

const std::vector<ParameterInfo>& parameter_table() {
  using P = ParameterSet;
  using D = Dimension;
  static const std::vector<ParameterInfo> table = {
      {"geometry.L", &P::edge, D::length, "mm", "tissue sample edge length", {}, {}},
      {"geometry.R", &P::radius, D::length, "mm", "vessel radius", {}, {}},

      {"tumor.M", &P::motility, D::motility, "mm2/(MPa*s)", "motility parameter", {}, {}},
      {"tumor.E", &P::young, D::pressure, "kPa", "Young modulus", {}, {}},
      {"tumor.phi_max", &P::phi_max, D::none, "", "maximum tumor cell volume fraction", 0.0, 1.0},
      {"tumor.phi_0", &P::phi_0, D::none, "", "stress-free tumor cell volume fraction", 0.0, 1.0},
      {"tumor.gamma", &P::gamma, D::rate, "1/h", "tumor cell proliferation rate", 1.16e-2, 3.46e-2},
      {"tumor.c_ref", &P::c_ref, D::pressure, "mmHg", "oxygen threshold for proliferation", 8.5, 10.5},

      {"flow.beta_p0", &P::beta_p0, D::wall_hydraulic, "mm2*h/kg", "healthy wall hydraulic permeability", {}, {}},
      {"flow.dp_onc", &P::dp_onc, D::pressure, "mmHg", "oncotic pressure jump", {}, {}},
      {"flow.beta_ls", &P::beta_ls, D::inverse_pressure_rate, "1/(mmHg*h)", "lymphatic effective permeability", {}, {}},
      {"flow.p_ls", &P::p_ls, D::pressure, "mmHg", "lymphatic pressure", {}, {}},
      {"flow.mu", &P::mu, D::viscosity, "Pa*s", "blood viscosity", {}, {}},
      {"flow.p_in", &P::p_in, D::pressure, "mmHg", "pressure at inlet markers", {}, {}},
      {"flow.p_out", &P::p_out, D::pressure, "mmHg", "pressure at outlet markers", {}, {}},
      {"flow.r_p", &P::r_p, D::none, "", "permeability scale for tumor-generated capillaries", 1.0, 100.0},
      {"flow.kappa", &P::kappa, D::area, "mm2", "tissue hydraulic permeability", 1e-12, 1e-7},

      {"oxygen.beta_c0", &P::beta_c0, D::velocity, "mm/h", "healthy wall oxygen permeability", {}, {}},
      {"oxygen.D_c", &P::d_c, D::diffusivity, "mm2/h", "tissue oxygen diffusivity", {}, {}},
      {"oxygen.D_c_vessel", &P::d_c_vessel, D::diffusivity, "mm2/h", "vascular oxygen diffusivity", {}, {}},
      {"oxygen.c_in", &P::c_in, D::pressure, "mmHg", "inlet oxygen concentration", {}, {}},
      {"oxygen.r_c", &P::r_c, D::none, "", "oxygen permeability scale for tumor-generated capillaries", 1.0, 100.0},
      {"oxygen.m_c", &P::m_c, D::rate, "1/h", "oxygen metabolization rate", 0.45, 0.55},

      {"vegf.D_g", &P::d_g, D::diffusivity, "mm2/h", "VEGF diffusivity", {}, {}},
      {"vegf.sigma", &P::sigma, D::rate, "1/h", "VEGF interstitial decay", {}, {}},
      {"vegf.c_star", &P::c_star, D::pressure, "mmHg", "reference oxygen of the VEGF source", {}, {}},
      {"vegf.b", &P::b, D::none, "", "steepness of the VEGF source", {}, {}},
      {"vegf.sigma_tilde", &P::sigma_tilde, D::rate, "1/h", "endothelial VEGF consumption rate", 0.2, 2.0},
      {"vegf.G", &P::production, D::rate, "1/h", "VEGF production rate", 0.25, 1.0},

      {"growth.g_lim", &P::g_lim, D::vegf, "1e-13kg/mm3", "minimum VEGF for proliferation", {}, {}},
      {"growth.g_bar", &P::g_bar, D::vegf, "1e-13kg/mm3", "VEGF giving t_c = 2 tau", 0.75, 1.25},
      {"growth.l_e", &P::l_e, D::length, "mm", "endothelial cell length", {}, {}},
      {"growth.alpha_br", &P::alpha_br, D::none, "", "perpendicular velocity threshold for branching", 0.2, 0.5},
      {"growth.d_br", &P::d_br, D::length, "mm", "branching distance", 0.04, 0.08},
      {"growth.tau_br", &P::tau_br, D::time, "h", "threshold age for branching", 24.0, 96.0},
      {"growth.g_br", &P::g_br, D::vegf, "1e-13kg/mm3", "VEGF giving branching probability 0.99", {}, {}},
      {"growth.tau", &P::tau, D::time, "h", "endothelial proliferation time", 12.0, 48.0},
  };
  return table;
}

const ParameterInfo* find_parameter(const std::string& key) {
  const auto& table = parameter_table();
  auto it = std::find_if(table.begin(), table.end(), [&](const ParameterInfo& p) { return p.key == key; });
  return it == table.end() ? nullptr : &*it;
}

double written_value(const ParameterSet& p, const ParameterInfo& info) {
  return p.*(info.field) / *unit_factor(info.dim, info.unit);
}

}  // namespace angio
