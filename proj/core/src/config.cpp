#include "angio/config.hpp"

#include "angio/angiogenesis.hpp"
#include "angio/presets.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace angio {

NewtonSettings SimulationConfig::newton() const {
  NewtonSettings s;
  s.max_iterations = newton_max_iterations;
  s.max_halvings = newton_max_halvings;
  return s;
}

TransportParameters SimulationConfig::transport() const {
  TransportParameters tp = TransportParameters::from(params);
  tp.outlet = outlet;
  tp.artificial_diffusion = artificial_diffusion;
  return tp;
}

std::uint64_t SimulationConfig::effective_ecm_seed() const {
  // splitmix64 step so that the ECM stream differs from the growth stream
  if (ecm_seed != 0) {
    return ecm_seed;
  }
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

int SimulationConfig::num_steps() const {
  return static_cast<int>(std::ceil(final_time / dt - 1e-9));
}

namespace {

std::string join(const std::vector<std::string>& items, const std::string& sep = "\n") {
  std::string out;
  for (const auto& s : items) {
    out += (out.empty() ? "" : sep) + s;
  }
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> diagnostics)
    : InputError("invalid configuration:\n" + join(diagnostics)), diagnostics_(std::move(diagnostics)) {}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

std::optional<long long> parse_integer(const std::string& s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    return std::nullopt;
  }
  return v;
}

struct Entry {
  int line = 0;
  std::string key;
  std::string raw;  // everything after '='
};

// Splits "1.5 mm" or "1.5 [mm]" into number text and unit.
std::pair<std::string, std::string> split_unit(const std::string& raw) {
  const auto sp = raw.find_first_of(" \t");
  if (sp == std::string::npos) {
    return {raw, {}};
  }
  std::string unit = trim(raw.substr(sp));
  if (unit.size() >= 2 && unit.front() == '[' && unit.back() == ']') {
    unit = trim(unit.substr(1, unit.size() - 2));
  }
  return {raw.substr(0, sp), unit};
}

std::string internal_unit(Dimension dim) {
  for (const auto& u : accepted_units(dim)) {
    if (unit_factor(dim, u) == 1.0) {
      return u;
    }
  }
  return {};
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

class Parser {
 public:
  Parser(const std::filesystem::path& base) : base_(base) {}

  ParsedConfig run(const std::string& text) {
    const auto entries = read_entries(text);
    std::set<std::string> seen;
    for (const auto& e : entries) {
      if (!seen.insert(e.key).second) {
        error(e, "duplicate key");
      }
    }
    for (const auto& e : entries) {
      if (e.key == "run.preset") {
        out_.config.preset = e.raw;
        try {
          apply_preset(out_.config.params, preset(e.raw));
        } catch (const InputError& ex) {
          error(e, ex.what());
        }
      }
    }
    for (const auto& e : entries) {
      if (e.key != "run.preset") {
        apply(e);
      }
    }
    for (const auto& key : required_config_keys()) {
      if (!seen.count(key)) {
        errors_.push_back("missing required key '" + key + "'");
      }
    }
    check();
    if (!errors_.empty()) {
      throw ConfigError(errors_);
    }
    return out_;
  }

 private:
  std::vector<Entry> read_entries(const std::string& text) {
    std::vector<Entry> entries;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int number = 0;
    while (std::getline(in, line)) {
      ++number;
      if (const auto hash = line.find('#'); hash != std::string::npos) {
        line.erase(hash);
      }
      line = trim(line);
      if (line.empty()) {
        continue;
      }
      if (line.front() == '[' && line.back() == ']') {
        section = trim(line.substr(1, line.size() - 2));
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        errors_.push_back("line " + std::to_string(number) + ": expected 'key = value'");
        continue;
      }
      Entry e;
      e.line = number;
      const std::string key = trim(line.substr(0, eq));
      e.key = section.empty() ? key : section + "." + key;
      e.raw = trim(line.substr(eq + 1));
      if (e.raw.empty()) {
        error(e, "missing value");
        continue;
      }
      entries.push_back(std::move(e));
    }
    return entries;
  }

  void error(const Entry& e, const std::string& msg) {
    errors_.push_back("line " + std::to_string(e.line) + ": " + e.key + ": " + msg);
  }

  std::optional<double> quantity(const Entry& e, Dimension dim, const std::string& default_unit) {
    const auto [num, unit] = split_unit(e.raw);
    const auto v = parse_double(num);
    if (!v) {
      error(e, "'" + num + "' is not a number");
      return std::nullopt;
    }
    const std::string u = unit.empty() ? default_unit : unit;
    const auto f = unit_factor(dim, u);
    if (!f) {
      error(e, "unknown unit '" + u + "'; accepted: " + join(accepted_units(dim), ", "));
      return std::nullopt;
    }
    return *v * *f;
  }

  std::optional<long long> integer(const Entry& e, long long min) {
    const auto v = parse_integer(e.raw);
    if (!v) {
      error(e, "'" + e.raw + "' is not an integer");
      return std::nullopt;
    }
    if (*v < min) {
      error(e, "must be at least " + std::to_string(min));
      return std::nullopt;
    }
    return v;
  }

  std::string path(const std::string& raw) const {
    std::filesystem::path p(raw);
    if (p.is_relative() && !base_.empty()) {
      p = base_ / p;
    }
    return p.lexically_normal().string();
  }

  void initial(const Entry& e, InitialField& f, Dimension dim, const std::string& unit, bool presolve_ok) {
    if (e.raw == "presolve") {
      if (!presolve_ok) {
        error(e, "no pre-solve is available for this field");
        return;
      }
      f = {InitialField::Kind::presolve, 0.0, {}};
    } else if (e.raw.rfind("file:", 0) == 0) {
      f = {InitialField::Kind::file, 0.0, path(e.raw.substr(5))};
    } else if (const auto v = quantity(e, dim, unit)) {
      f = {InitialField::Kind::constant, *v, {}};
    }
  }

  void apply(const Entry& e) {
    SimulationConfig& c = out_.config;
    if (const ParameterInfo* info = find_parameter(e.key)) {
      if (const auto v = quantity(e, info->dim, info->unit)) {
        c.params.*(info->field) = *v;
      }
      return;
    }
    using Handler = std::function<void(const Entry&)>;
    const std::map<std::string, Handler> handlers = {
        {"run.mesh",
         [&](const Entry& x) { c.mesh = x.raw.rfind("cube:", 0) == 0 ? x.raw : path(x.raw); }},
        {"run.network", [&](const Entry& x) { c.network = path(x.raw); }},
        {"run.T", [&](const Entry& x) { set(c.final_time, quantity(x, Dimension::time, "h")); }},
        {"run.dt", [&](const Entry& x) { set(c.dt, quantity(x, Dimension::time, "h")); }},
        {"run.seed",
         [&](const Entry& x) {
           if (const auto v = integer(x, 0)) c.seed = static_cast<std::uint64_t>(*v);
         }},
        {"run.vtk_every", [&](const Entry& x) { set(c.vtk_every, integer(x, 0)); }},
        {"run.checkpoint_every", [&](const Entry& x) { set(c.checkpoint_every, integer(x, 0)); }},
        {"run.output_dir", [&](const Entry& x) { c.output_dir = x.raw; }},
        {"initial.phi", [&](const Entry& x) { initial(x, c.phi, Dimension::none, "", false); }},
        {"initial.pressure", [&](const Entry& x) { initial(x, c.pressure, Dimension::pressure, "mmHg", true); }},
        {"initial.oxygen", [&](const Entry& x) { initial(x, c.oxygen, Dimension::pressure, "mmHg", true); }},
        {"initial.g", [&](const Entry& x) { initial(x, c.vegf, Dimension::vegf, "1e-13kg/mm3", false); }},
        {"numerics.partition_density",
         [&](const Entry& x) { set(c.partition_density, quantity(x, Dimension::none, "")); }},
        {"numerics.ecm_perturbation",
         [&](const Entry& x) { set(c.ecm_perturbation, quantity(x, Dimension::none, "")); }},
        {"numerics.ecm_seed",
         [&](const Entry& x) {
           if (const auto v = integer(x, 0)) c.ecm_seed = static_cast<std::uint64_t>(*v);
         }},
        {"numerics.oxygen_outlet",
         [&](const Entry& x) {
           if (x.raw == "zero_flux") {
             c.outlet = OutletCondition::zero_flux;
           } else if (x.raw == "zero_concentration") {
             c.outlet = OutletCondition::zero_concentration;
           } else {
             error(x, "expected zero_flux or zero_concentration");
           }
         }},
        {"numerics.artificial_diffusion",
         [&](const Entry& x) {
           if (x.raw == "true" || x.raw == "false") {
             c.artificial_diffusion = x.raw == "true";
           } else {
             error(x, "expected true or false");
           }
         }},
        {"numerics.case_iterations", [&](const Entry& x) { set(c.case_iterations, integer(x, 1)); }},
        {"numerics.presolve_case_iterations",
         [&](const Entry& x) { set(c.presolve_case_iterations, integer(x, 1)); }},
        {"numerics.newton_max_iterations", [&](const Entry& x) { set(c.newton_max_iterations, integer(x, 1)); }},
        {"numerics.newton_max_halvings", [&](const Entry& x) { set(c.newton_max_halvings, integer(x, 0)); }},
    };
    const auto it = handlers.find(e.key);
    if (it == handlers.end()) {
      error(e, "unknown key");
      return;
    }
    it->second(e);
  }

  template <typename T, typename V>
  static void set(T& target, const std::optional<V>& v) {
    if (v) {
      target = static_cast<T>(*v);
    }
  }

  void check() {
    const SimulationConfig& c = out_.config;
    if (!(c.final_time > 0.0)) {
      errors_.push_back("run.T: final time must be positive");
    }
    if (!(c.dt > 0.0)) {
      errors_.push_back("run.dt: time step must be positive");
    } else if (c.final_time > 0.0 && std::fabs(c.final_time / c.dt - std::round(c.final_time / c.dt)) > 1e-9) {
      out_.warnings.push_back("run.T is not a multiple of run.dt; the last step ends after T");
    }
    if (!(c.partition_density > 0.0)) {
      errors_.push_back("numerics.partition_density must be positive");
    }
    if (c.ecm_perturbation < 0.0 || c.ecm_perturbation >= 0.5) {
      errors_.push_back("numerics.ecm_perturbation must lie in [0, 0.5)");
    }
    if (c.phi.kind == InitialField::Kind::constant && !(c.phi.value > 0.0 && c.phi.value < c.params.phi_max)) {
      errors_.push_back("initial.phi must lie in (0, phi_max)");
    }
    if (!(c.params.radius > 0.0 && c.params.edge > 0.0)) {
      errors_.push_back("geometry.L and geometry.R must be positive");
    }
    try {
      TumorConstitutive::from(c.params).validate();
    } catch (const InputError& ex) {
      errors_.push_back(ex.what());
    }
    try {
      GrowthParameters::from(c.params).validate();
    } catch (const InputError& ex) {
      errors_.push_back(ex.what());
    }
    for (const auto& info : parameter_table()) {
      const double v = written_value(c.params, info);
      if ((info.min && v < *info.min) || (info.max && v > *info.max)) {
        out_.warnings.push_back(info.key + " = " + format_double(v) + (info.unit.empty() ? "" : " " + info.unit) +
                                " lies outside the documented range [" + format_double(*info.min) + ", " +
                                format_double(*info.max) + "]");
      }
    }
    const double gb = c.params.g_br / c.params.g_bar;
    if (gb < 1.0 || gb > 2.0) {
      out_.warnings.push_back("growth.g_br lies outside the documented range [g_bar, 2 g_bar]");
    }
  }

  std::filesystem::path base_;
  ParsedConfig out_;
  std::vector<std::string> errors_;
};

std::string initial_text(const InitialField& f, Dimension dim) {
  switch (f.kind) {
    case InitialField::Kind::presolve: return "presolve";
    case InitialField::Kind::file: return "file:" + f.path;
    case InitialField::Kind::constant: break;
  }
  const std::string u = internal_unit(dim);
  return format_double(f.value) + (u.empty() ? "" : " " + u);
}

}  // namespace

std::vector<std::string> config_keys() {
  return {"run.mesh",
          "run.network",
          "run.preset",
          "run.T",
          "run.dt",
          "run.seed",
          "run.vtk_every",
          "run.checkpoint_every",
          "run.output_dir",
          "initial.phi",
          "initial.pressure",
          "initial.oxygen",
          "initial.g",
          "numerics.partition_density",
          "numerics.ecm_perturbation",
          "numerics.ecm_seed",
          "numerics.oxygen_outlet",
          "numerics.artificial_diffusion",
          "numerics.case_iterations",
          "numerics.presolve_case_iterations",
          "numerics.newton_max_iterations",
          "numerics.newton_max_halvings"};
}

std::vector<std::string> required_config_keys() { return {"run.mesh", "run.network", "run.T"}; }

ParsedConfig validate_config(const std::string& text, const std::filesystem::path& base_dir) {
  return Parser(base_dir).run(text);
}

ParsedConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot read config " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return validate_config(ss.str(), path.parent_path());
}

std::string serialize_config(const SimulationConfig& c) {
  std::ostringstream os;
  os << "[run]\n";
  os << "mesh = " << c.mesh << "\nnetwork = " << c.network << '\n';
  if (!c.preset.empty()) {
    os << "preset = " << c.preset << '\n';
  }
  os << "T = " << format_double(c.final_time) << " h\n";
  os << "dt = " << format_double(c.dt) << " h\n";
  os << "seed = " << c.seed << '\n';
  os << "vtk_every = " << c.vtk_every << '\n';
  os << "checkpoint_every = " << c.checkpoint_every << '\n';
  os << "output_dir = " << c.output_dir << "\n\n";

  os << "[initial]\n";
  os << "phi = " << initial_text(c.phi, Dimension::none) << '\n';
  os << "pressure = " << initial_text(c.pressure, Dimension::pressure) << '\n';
  os << "oxygen = " << initial_text(c.oxygen, Dimension::pressure) << '\n';
  os << "g = " << initial_text(c.vegf, Dimension::vegf) << "\n\n";

  os << "[numerics]\n";
  os << "partition_density = " << format_double(c.partition_density) << '\n';
  os << "ecm_perturbation = " << format_double(c.ecm_perturbation) << '\n';
  os << "ecm_seed = " << c.ecm_seed << '\n';
  os << "oxygen_outlet = " << (c.outlet == OutletCondition::zero_flux ? "zero_flux" : "zero_concentration") << '\n';
  os << "artificial_diffusion = " << (c.artificial_diffusion ? "true" : "false") << '\n';
  os << "case_iterations = " << c.case_iterations << '\n';
  os << "presolve_case_iterations = " << c.presolve_case_iterations << '\n';
  os << "newton_max_iterations = " << c.newton_max_iterations << '\n';
  os << "newton_max_halvings = " << c.newton_max_halvings << '\n';

  // internal units carry factor 1, so values survive the round trip bit for bit
  std::string section;
  for (const auto& info : parameter_table()) {
    const auto dot = info.key.find('.');
    const std::string sec = info.key.substr(0, dot);
    if (sec != section) {
      os << "\n[" << sec << "]\n";
      section = sec;
    }
    const std::string u = internal_unit(info.dim);
    os << info.key.substr(dot + 1) << " = " << format_double(c.params.*(info.field)) << (u.empty() ? "" : " " + u)
       << '\n';
  }
  return os.str();
}

}  // namespace angio
