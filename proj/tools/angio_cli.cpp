// Command line front end: run, morris, postprocess, preset, validate, mesh.

#include "angio/config.hpp"
#include "angio/mesh.hpp"
#include "angio/plot.hpp"
#include "angio/presets.hpp"
#include "angio/sensitivity.hpp"
#include "angio/simulation.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <iostream>
#include <thread>

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

angio::SimulationConfig load(const std::string& path) {
  const auto parsed = angio::load_config(path);
  for (const auto& w : parsed.warnings) {
    std::cerr << "warning: " << w << '\n';
  }
  return parsed.config;
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out,
            const std::string& restart, bool quiet) {
  angio::SimulationConfig cfg = load(config_path);
  if (seed) {
    cfg.seed = *seed;
  }
  if (!out.empty()) {
    cfg.output_dir = out;
  }
  angio::RunOptions opts;
  if (!restart.empty()) {
    opts.restart = restart;
  }
  const auto start = std::chrono::steady_clock::now();
  if (!quiet) {
    opts.on_step = [&](const angio::StepRecord& r) {
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::cout << "step " << r.step << "  t = " << r.time / 24.0 << " d  mean phi = " << r.mean_phi
                << "  C_avg = " << r.c_avg << "  tips = " << r.tips << "  L = " << r.length << " mm  ("
                << secs << " s)\n";
    };
  }
  const auto series = angio::run(cfg, opts);
  const auto& last = series.records.back();
  std::cout << "finished " << last.step << " steps; outputs in " << cfg.output_dir << '\n';
  return 0;
}

std::vector<double> default_times(const angio::SimulationConfig& cfg) {
  std::vector<double> t;
  for (double d : {7.0, 14.0, 21.0}) {
    if (d * 24.0 <= cfg.final_time + 1e-9) {
      t.push_back(d * 24.0);
    }
  }
  if (t.empty()) {
    t.push_back(cfg.final_time);
  }
  return t;
}

int cmd_morris(const std::string& config_path, const std::string& space_path, int R, int r, int p,
               const std::string& out, int workers, std::vector<double> days, std::vector<std::string> outputs,
               std::optional<std::uint64_t> seed) {
  angio::SimulationConfig cfg = load(config_path);
  angio::InputSpace space = angio::load_space(space_path);
  if (p > 0) {
    space.p = p;
    space.validate();
  }
  angio::CampaignSettings s;
  s.R = R;
  s.r = r;
  s.seed = seed.value_or(cfg.seed);
  s.workers = workers;
  s.outputs = outputs.empty() ? std::vector<std::string>{"P_phi", "C_avg", "rho_net", "V_omega"} : outputs;
  if (days.empty()) {
    s.times = default_times(cfg);
  } else {
    for (double d : days) {
      s.times.push_back(d * 24.0);
    }
  }
  const auto start = std::chrono::steady_clock::now();
  const auto result = angio::run_campaign(space, cfg.params, s, angio::simulation_model(cfg, s.outputs, s.times));
  angio::write_report(out, space, result);
  int failed = 0;
  for (const auto& run : result.runs) {
    if (!run.values) {
      ++failed;
      std::cerr << "run " << run.trajectory << "/" << run.point << " failed: " << run.error << '\n';
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << result.runs.size() << " runs (" << failed << " failed) in " << secs << " s; report in " << out
            << '\n';
  return 0;
}

int cmd_postprocess(const std::vector<std::string>& series, const std::vector<std::string>& labels,
                    const std::string& metric, std::string out) {
  std::vector<std::filesystem::path> paths(series.begin(), series.end());
  if (out.empty()) {
    out = (paths.front().parent_path() / (metric + ".svg")).string();
  }
  angio::plot_series(paths, labels, metric, out);
  std::cout << "wrote " << out << '\n';
  return 0;
}

int cmd_preset(bool list, const std::string& show) {
  if (!show.empty()) {
    const auto& p = angio::preset(show);
    std::cout << p.name << ": " << p.description << '\n';
    for (const auto& [key, value] : p.overrides) {
      const auto* info = angio::find_parameter(key);
      std::cout << "  " << key << " = " << value << (info->unit.empty() ? "" : " " + info->unit) << '\n';
    }
    return 0;
  }
  (void)list;
  for (const auto& p : angio::presets()) {
    std::cout << p.name << "\t" << p.description << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tumor growth and angiogenesis simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run one simulation");
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string restart;
  bool quiet = false;
  run->add_option("--config", config, "Configuration file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override the random seed");
  run->add_option("--out", out, "Override the output directory");
  run->add_option("--restart", restart, "Resume from a saved state (.bin)");
  run->add_flag("--quiet", quiet, "Only print the final line");

  auto* morris = app.add_subcommand("morris", "Elementary effects campaign");
  std::string space;
  int R = 1000;
  int r = 50;
  int p = 0;
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::vector<double> days;
  std::vector<std::string> outputs;
  std::string morris_out = "morris";
  morris->add_option("--config", config, "Base configuration")->required()->check(CLI::ExistingFile);
  morris->add_option("--space", space, "Input space file")->required()->check(CLI::ExistingFile);
  morris->add_option("--R", R, "Generated trajectories")->capture_default_str();
  morris->add_option("--r", r, "Selected trajectories")->capture_default_str();
  morris->add_option("--p", p, "Grid levels (overrides the space file)");
  morris->add_option("--out", morris_out, "Report directory")->capture_default_str();
  morris->add_option("--workers", workers, "Concurrent simulations")->capture_default_str();
  morris->add_option("--days", days, "Report times in days (default 7 14 21)");
  morris->add_option("--outputs", outputs, "Output columns (default P_phi C_avg rho_net V_omega)");
  morris->add_option("--seed", seed, "Trajectory seed (default: config seed)");

  auto* post = app.add_subcommand("postprocess", "SVG line plot of a series column");
  std::vector<std::string> series;
  std::vector<std::string> labels;
  std::string metric;
  std::string plot_out;
  post->add_option("--series", series, "series.csv files to overlay")->required();
  post->add_option("--plot", metric, "Column to plot, e.g. C_avg")->required();
  post->add_option("--label", labels, "Legend labels, one per series");
  post->add_option("--out", plot_out, "SVG path (default next to the first series)");

  auto* pre = app.add_subcommand("preset", "List or show parameter presets");
  bool list = false;
  std::string show;
  pre->add_flag("--list", list, "List presets");
  pre->add_option("--show", show, "Print the overrides of one preset");

  auto* validate = app.add_subcommand("validate", "Check a configuration and print it fully resolved");
  validate->add_option("--config", config, "Configuration file")->required()->check(CLI::ExistingFile);

  auto* mesh = app.add_subcommand("mesh", "Write a structured cube mesh");
  int cells = 10;
  double edge = 2.5;
  std::string mesh_out;
  mesh->add_option("--cells", cells, "Cells per side")->capture_default_str();
  mesh->add_option("--edge", edge, "Edge length (mm)")->capture_default_str();
  mesh->add_option("--out", mesh_out, "Mesh file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*run) return cmd_run(config, seed, out, restart, quiet);
    if (*morris) return cmd_morris(config, space, R, r, p, morris_out, workers, days, outputs, seed);
    if (*post) return cmd_postprocess(series, labels, metric, plot_out);
    if (*pre) return cmd_preset(list, show);
    if (*validate) {
      const auto parsed = angio::load_config(config);
      for (const auto& w : parsed.warnings) {
        std::cerr << "warning: " << w << '\n';
      }
      std::cout << angio::serialize_config(parsed.config);
      return 0;
    }
    if (*mesh) {
      angio::save_mesh(mesh_out, angio::make_cube_mesh(cells, edge));
      return 0;
    }
  } catch (const angio::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const angio::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return 0;
}
