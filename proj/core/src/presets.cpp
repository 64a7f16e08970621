#include "angio/presets.hpp"

#include "angio/common.hpp"

namespace angio {

namespace {

std::vector<std::pair<std::string, double>> set1_values() {
  return {
      {"tumor.gamma", 1.93e-2}, {"tumor.c_ref", 10.5}, {"vegf.G", 1.0},
      {"vegf.sigma_tilde", 1.4}, {"growth.tau", 36.0}, {"flow.r_p", 21.38},
      {"oxygen.r_c", 1.0},      {"flow.kappa", 3.22e-9}, {"oxygen.m_c", 0.55},
  };
}

std::vector<std::pair<std::string, double>> with_growth(double tau_br, double alpha_br) {
  auto v = set1_values();
  v.insert(v.end(), {
                        {"growth.d_br", 6.67e-2},
                        {"growth.tau_br", tau_br},
                        {"growth.g_bar", 1.08},
                        {"growth.g_br", 1.81},
                        {"growth.alpha_br", alpha_br},
                    });
  return v;
}

}  // namespace

const std::vector<ScenarioPreset>& presets() {
  static const std::vector<ScenarioPreset> all = {
      {"set1", "lower proliferation, healthy-like oxygen wall permeability", set1_values()},
      {"set2",
       "faster proliferation at lower oxygen, leakier tumor capillaries",
       {
           {"tumor.gamma", 2.70e-2}, {"tumor.c_ref", 9.83}, {"vegf.G", 0.75},
           {"vegf.sigma_tilde", 2.0}, {"growth.tau", 24.0}, {"flow.r_p", 100.0},
           {"oxygen.r_c", 21.38},    {"flow.kappa", 3.22e-9}, {"oxygen.m_c", 0.45},
       }},
      {"set1a", "set1 with frequent branching (tau_br = 48 h)", with_growth(48.0, 0.3)},
      {"set1b", "set1 with rare branching (tau_br = 96 h)", with_growth(96.0, 0.5)},
  };
  return all;
}

const ScenarioPreset& preset(const std::string& name) {
  std::string known;
  for (const auto& p : presets()) {
    if (p.name == name) {
      return p;
    }
    known += (known.empty() ? "" : ", ") + p.name;
  }
  throw InputError("unknown preset '" + name + "'; available: " + known);
}

void apply_override(ParameterSet& params, const std::string& key, double written) {
  const ParameterInfo* info = find_parameter(key);
  if (!info) {
    throw InputError("unknown parameter '" + key + "'");
  }
  params.*(info->field) = written * *unit_factor(info->dim, info->unit);
}

void apply_preset(ParameterSet& params, const ScenarioPreset& p) {
  for (const auto& [key, value] : p.overrides) {
    apply_override(params, key, value);
  }
}

}  // namespace angio
