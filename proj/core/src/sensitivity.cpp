#include "angio/sensitivity.hpp"

#include "angio/plot.hpp"
#include "angio/presets.hpp"
#include "angio/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

namespace angio {

double InputSpace::delta() const { return static_cast<double>(p) / (2.0 * (p - 1)); }

void InputSpace::validate() const {
  if (p < 2 || p % 2 != 0) {
    throw InputError("Morris grid needs an even number of levels p >= 2, got " + std::to_string(p));
  }
  if (inputs.empty()) {
    throw InputError("input space is empty");
  }
  std::set<std::string> names;
  for (const auto& in : inputs) {
    if (!find_parameter(in.name)) {
      throw InputError("input '" + in.name + "' is not a parameter key");
    }
    if (!names.insert(in.name).second) {
      throw InputError("input '" + in.name + "' listed twice");
    }
    if (!(in.a < in.b)) {
      throw InputError("input '" + in.name + "': bounds must satisfy a < b");
    }
    if (in.distribution == Distribution::log_uniform && !(in.a > 0.0)) {
      throw InputError("input '" + in.name + "': log-uniform bounds must be positive");
    }
    if (!in.relative_to.empty() && !find_parameter(in.relative_to)) {
      throw InputError("input '" + in.name + "': unknown reference parameter '" + in.relative_to + "'");
    }
  }
  for (const auto& in : inputs) {
    if (in.relative_to.empty()) {
      continue;
    }
    for (const auto& other : inputs) {
      if (other.name == in.relative_to && !other.relative_to.empty()) {
        throw InputError("input '" + in.name + "' refers to another relative input");
      }
    }
  }
}

InputSpace parse_space(const std::string& text) {
  InputSpace space;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  auto fail = [&](const std::string& msg) {
    throw InputError("space line " + std::to_string(number) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++number;
    if (const auto h = line.find('#'); h != std::string::npos) {
      line.erase(h);
    }
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    if (const auto eq = line.find('='); eq != std::string::npos) {
      std::istringstream ks(line.substr(0, eq));
      std::string key;
      ks >> key;
      if (key != "p") {
        fail("unknown setting '" + key + "'");
      }
      std::istringstream vs(line.substr(eq + 1));
      if (!(vs >> space.p)) {
        fail("p must be an integer");
      }
      continue;
    }
    std::istringstream ls(line);
    InputSpec spec;
    std::string dist;
    if (!(ls >> spec.name >> dist >> spec.a >> spec.b)) {
      fail("expected 'name uniform|loguniform a b'");
    }
    if (dist == "uniform") {
      spec.distribution = Distribution::uniform;
    } else if (dist == "loguniform" || dist == "log-uniform") {
      spec.distribution = Distribution::log_uniform;
    } else {
      fail("unknown distribution '" + dist + "'");
    }
    std::string word;
    if (ls >> word) {
      if (word != "relative_to" || !(ls >> spec.relative_to)) {
        fail("expected 'relative_to KEY'");
      }
    }
    if (ls >> word) {
      fail("trailing text '" + word + "'");
    }
    space.inputs.push_back(spec);
  }
  space.validate();
  return space;
}

InputSpace load_space(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot read space file " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_space(ss.str());
}

InputSpace default_space(const std::vector<std::string>& names, int p) {
  static const std::set<std::string> log_scaled = {"flow.r_p", "flow.kappa", "oxygen.r_c"};
  InputSpace space;
  space.p = p;
  for (const auto& name : names) {
    InputSpec spec;
    spec.name = name;
    if (name == "growth.g_br") {
      spec.a = 1.0;
      spec.b = 2.0;
      spec.relative_to = "growth.g_bar";
    } else {
      const ParameterInfo* info = find_parameter(name);
      if (!info || !info->min || !info->max) {
        throw InputError("parameter '" + name + "' has no documented range");
      }
      spec.a = *info->min;
      spec.b = *info->max;
      if (log_scaled.count(name)) {
        spec.distribution = Distribution::log_uniform;
      }
    }
    space.inputs.push_back(spec);
  }
  space.validate();
  return space;
}

std::vector<Trajectory> generate_trajectories(const InputSpace& space, int R, Rng& rng) {
  space.validate();
  if (R < 1) {
    throw InputError("number of trajectories must be at least 1");
  }
  const int k = space.k();
  const int p = space.p;
  const int jump = p / 2;  // Delta in level units
  const double scale = 1.0 / (p - 1);

  // Number of distinct trajectories: (p/2)^K base levels, 2^K signs, K! orders.
  double distinct = 1.0;
  for (int i = 1; i <= k; ++i) {
    distinct *= jump * 2.0 * i;
  }
  if (R > distinct) {
    throw InputError("only " + std::to_string(static_cast<long long>(distinct)) +
                     " distinct trajectories exist for this grid");
  }

  std::vector<Trajectory> out;
  std::set<std::vector<int>> seen;
  long long attempts = 0;
  const long long max_attempts = 1000LL * R + 10000;
  while (static_cast<int>(out.size()) < R) {
    if (++attempts > max_attempts) {
      throw InputError("could not generate distinct trajectories");
    }
    std::vector<int> level(static_cast<std::size_t>(k));
    std::vector<int> sign(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      const int lower = std::min(jump - 1, static_cast<int>(rng.uniform() * jump));
      sign[static_cast<std::size_t>(i)] = rng.uniform() < 0.5 ? -1 : 1;
      level[static_cast<std::size_t>(i)] = sign[static_cast<std::size_t>(i)] > 0 ? lower : lower + jump;
    }
    std::vector<int> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), 0);
    for (int i = k - 1; i > 0; --i) {
      const int j = std::min(i, static_cast<int>(rng.uniform() * (i + 1)));
      std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
    std::vector<int> key = level;
    key.insert(key.end(), order.begin(), order.end());
    key.insert(key.end(), sign.begin(), sign.end());
    if (!seen.insert(key).second) {
      continue;
    }
    Trajectory t;
    auto point = [&] {
      std::vector<double> x(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i) {
        x[static_cast<std::size_t>(i)] = level[static_cast<std::size_t>(i)] * scale;
      }
      return x;
    };
    t.points.push_back(point());
    for (int m = 0; m < k; ++m) {
      const int i = order[static_cast<std::size_t>(m)];
      const int s = sign[static_cast<std::size_t>(i)];
      level[static_cast<std::size_t>(i)] += s * jump;
      t.order.push_back(i);
      t.signs.push_back(s);
      t.points.push_back(point());
    }
    out.push_back(std::move(t));
  }
  return out;
}

double trajectory_distance(const Trajectory& a, const Trajectory& b) {
  double d = 0.0;
  for (const auto& x : a.points) {
    for (const auto& y : b.points) {
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        s += (x[i] - y[i]) * (x[i] - y[i]);
      }
      d += std::sqrt(s);
    }
  }
  return d;
}

double spread(const std::vector<Trajectory>& all, const std::vector<int>& subset) {
  double s = 0.0;
  for (std::size_t i = 0; i < subset.size(); ++i) {
    for (std::size_t j = i + 1; j < subset.size(); ++j) {
      const double d = trajectory_distance(all[static_cast<std::size_t>(subset[i])],
                                           all[static_cast<std::size_t>(subset[j])]);
      s += d * d;
    }
  }
  return std::sqrt(s);
}

namespace {

double binomial_capped(int n, int k, double cap) {
  k = std::min(k, n - k);
  double c = 1.0;
  for (int i = 1; i <= k; ++i) {
    c = c * (n - k + i) / i;
    if (c > cap) {
      return c;
    }
  }
  return c;
}

}  // namespace

std::vector<int> select_spread(const std::vector<Trajectory>& all, int r) {
  const int R = static_cast<int>(all.size());
  if (r <= 0) {
    throw InputError("number of selected trajectories must be positive");
  }
  if (r > R) {
    throw InputError("cannot select " + std::to_string(r) + " of " + std::to_string(R) + " trajectories");
  }
  std::vector<int> chosen(static_cast<std::size_t>(r));
  std::iota(chosen.begin(), chosen.end(), 0);
  if (r == R || r == 1) {
    return chosen;
  }
  std::vector<double> d2(static_cast<std::size_t>(R) * R, 0.0);
  auto at = [&](int i, int j) -> double& { return d2[static_cast<std::size_t>(i) * R + j]; };
  for (int i = 0; i < R; ++i) {
    for (int j = i + 1; j < R; ++j) {
      const double d = trajectory_distance(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(j)]);
      at(i, j) = at(j, i) = d * d;
    }
  }
  auto objective = [&](const std::vector<int>& s) {
    double v = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (std::size_t j = i + 1; j < s.size(); ++j) {
        v += at(s[i], s[j]);
      }
    }
    return v;
  };

  if (binomial_capped(R, r, 1e5) <= 1e5) {
    std::vector<int> comb = chosen;
    std::vector<int> best = comb;
    double best_v = objective(comb);
    while (true) {
      int i = r - 1;
      while (i >= 0 && comb[static_cast<std::size_t>(i)] == R - r + i) {
        --i;
      }
      if (i < 0) {
        break;
      }
      ++comb[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < r; ++j) {
        comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
      }
      const double v = objective(comb);
      if (v > best_v) {
        best_v = v;
        best = comb;
      }
    }
    return best;
  }

  // Greedy augmentation from the farthest pair.
  std::vector<char> in(static_cast<std::size_t>(R), 0);
  int bi = 0;
  int bj = 1;
  for (int i = 0; i < R; ++i) {
    for (int j = i + 1; j < R; ++j) {
      if (at(i, j) > at(bi, bj)) {
        bi = i;
        bj = j;
      }
    }
  }
  std::vector<int> s = {bi, bj};
  in[static_cast<std::size_t>(bi)] = in[static_cast<std::size_t>(bj)] = 1;
  std::vector<double> gain(static_cast<std::size_t>(R), 0.0);
  for (int c = 0; c < R; ++c) {
    gain[static_cast<std::size_t>(c)] = at(c, bi) + at(c, bj);
  }
  while (static_cast<int>(s.size()) < r) {
    int best = -1;
    for (int c = 0; c < R; ++c) {
      if (!in[static_cast<std::size_t>(c)] && (best < 0 || gain[static_cast<std::size_t>(c)] > gain[static_cast<std::size_t>(best)])) {
        best = c;
      }
    }
    s.push_back(best);
    in[static_cast<std::size_t>(best)] = 1;
    for (int c = 0; c < R; ++c) {
      gain[static_cast<std::size_t>(c)] += at(c, best);
    }
  }

  // Pairwise swaps. gain[c] holds sum over the current subset of d2(c, .).
  for (int pass = 0; pass < 1000; ++pass) {
    bool improved = false;
    const double total = objective(s);
    for (std::size_t pos = 0; pos < s.size() && !improved; ++pos) {
      const int out = s[pos];
      for (int c = 0; c < R; ++c) {
        if (in[static_cast<std::size_t>(c)]) {
          continue;
        }
        const double delta =
            (gain[static_cast<std::size_t>(c)] - at(c, out)) - gain[static_cast<std::size_t>(out)];
        if (delta > 1e-12 * std::max(1.0, total)) {
          s[pos] = c;
          in[static_cast<std::size_t>(out)] = 0;
          in[static_cast<std::size_t>(c)] = 1;
          for (int x = 0; x < R; ++x) {
            gain[static_cast<std::size_t>(x)] += at(x, c) - at(x, out);
          }
          improved = true;
          break;
        }
      }
    }
    if (!improved) {
      break;
    }
  }
  std::sort(s.begin(), s.end());
  return s;
}

double map_unit(const InputSpec& input, double u) {
  if (u <= 0.0) {
    return input.a;
  }
  if (u >= 1.0) {
    return input.b;
  }
  if (input.distribution == Distribution::uniform) {
    return input.a + u * (input.b - input.a);
  }
  return std::exp(std::log(input.a) + u * (std::log(input.b) - std::log(input.a)));
}

std::vector<std::pair<std::string, double>> map_to_physical(const std::vector<double>& point,
                                                            const InputSpace& space, const ParameterSet& base) {
  if (static_cast<int>(point.size()) != space.k()) {
    throw InputError("map_to_physical: point dimension does not match the input space");
  }
  ParameterSet params = base;
  std::vector<std::pair<std::string, double>> out(point.size());
  for (std::size_t i = 0; i < point.size(); ++i) {
    const InputSpec& in = space.inputs[i];
    if (in.relative_to.empty()) {
      out[i] = {in.name, map_unit(in, point[i])};
      apply_override(params, in.name, out[i].second);
    }
  }
  for (std::size_t i = 0; i < point.size(); ++i) {
    const InputSpec& in = space.inputs[i];
    if (!in.relative_to.empty()) {
      const double ref = written_value(params, *find_parameter(in.relative_to));
      out[i] = {in.name, map_unit(in, point[i]) * ref};
    }
  }
  return out;
}

std::vector<std::optional<double>> elementary_effects(const Trajectory& t,
                                                      const std::vector<std::optional<double>>& y,
                                                      double delta) {
  if (y.size() != t.points.size()) {
    throw InputError("elementary_effects: one model value per trajectory point is required");
  }
  std::vector<std::optional<double>> d(t.order.size());
  for (std::size_t m = 0; m < t.order.size(); ++m) {
    const auto& a = y[m];
    const auto& b = y[m + 1];
    if (a && b && std::isfinite(*a) && std::isfinite(*b)) {
      d[static_cast<std::size_t>(t.order[m])] = t.signs[m] * (*b - *a) / delta;
    }
  }
  return d;
}

EeStats summarize_effects(const std::vector<std::optional<double>>& effects) {
  EeStats s;
  std::vector<double> v;
  for (const auto& e : effects) {
    if (e) {
      v.push_back(*e);
    } else {
      ++s.missing;
    }
  }
  s.count = static_cast<int>(v.size());
  if (v.empty()) {
    s.mu_star = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  double abs_sum = 0.0;
  for (double x : v) {
    abs_sum += std::fabs(x);
  }
  s.mu_star = abs_sum / s.count;
  if (s.count >= 2) {
    // Shifted by the first effect so that identical effects give exactly 0.
    const double shift = v.front();
    double m = 0.0;
    for (double x : v) {
      m += x - shift;
    }
    m /= s.count;
    double ss = 0.0;
    for (double x : v) {
      ss += (x - shift - m) * (x - shift - m);
    }
    s.sigma = std::sqrt(ss / (s.count - 1));
  }
  return s;
}

EeSummary summarize_campaign(const InputSpace& space, const CampaignSettings& settings,
                             const std::vector<Trajectory>& selected, const std::vector<CampaignRun>& runs) {
  EeSummary sum;
  for (const auto& in : space.inputs) {
    sum.inputs.push_back(in.name);
  }
  sum.outputs = settings.outputs;
  sum.times = settings.times;
  const std::size_t no = settings.outputs.size();
  const std::size_t nt = settings.times.size();
  const std::size_t k = space.inputs.size();
  sum.stats.assign(no, std::vector<std::vector<EeStats>>(nt, std::vector<EeStats>(k)));
  sum.mu_max.assign(no, 0.0);
  sum.sigma_max.assign(no, 0.0);

  // values[trajectory][point]
  std::vector<std::vector<const CampaignRun*>> table(selected.size(),
                                                     std::vector<const CampaignRun*>(k + 1, nullptr));
  for (const auto& run : runs) {
    table[static_cast<std::size_t>(run.trajectory)][static_cast<std::size_t>(run.point)] = &run;
  }
  for (std::size_t o = 0; o < no; ++o) {
    for (std::size_t ti = 0; ti < nt; ++ti) {
      std::vector<std::vector<std::optional<double>>> effects(k);
      for (std::size_t tr = 0; tr < selected.size(); ++tr) {
        std::vector<std::optional<double>> y(k + 1);
        for (std::size_t m = 0; m <= k; ++m) {
          const CampaignRun* run = table[tr][m];
          if (run && run->values) {
            y[m] = (*run->values)[o][ti];
          }
        }
        const auto d = elementary_effects(selected[tr], y, space.delta());
        for (std::size_t i = 0; i < k; ++i) {
          effects[i].push_back(d[i]);
        }
      }
      for (std::size_t i = 0; i < k; ++i) {
        EeStats st = summarize_effects(effects[i]);
        if (std::isfinite(st.mu_star)) {
          sum.mu_max[o] = std::max(sum.mu_max[o], st.mu_star);
        }
        if (st.sigma) {
          sum.sigma_max[o] = std::max(sum.sigma_max[o], *st.sigma);
        }
        sum.stats[o][ti][i] = st;
      }
    }
  }
  return sum;
}

CampaignResult run_campaign(const InputSpace& space, const ParameterSet& base, const CampaignSettings& settings,
                            const ModelFn& model) {
  space.validate();
  if (settings.outputs.empty() || settings.times.empty()) {
    throw InputError("campaign needs at least one output and one report time");
  }
  CampaignResult res;
  Rng rng(settings.seed);
  res.trajectories = generate_trajectories(space, settings.R, rng);
  res.selected = select_spread(res.trajectories, settings.r);

  std::vector<Trajectory> chosen;
  for (int idx : res.selected) {
    chosen.push_back(res.trajectories[static_cast<std::size_t>(idx)]);
  }
  for (std::size_t t = 0; t < chosen.size(); ++t) {
    for (std::size_t m = 0; m < chosen[t].points.size(); ++m) {
      CampaignRun run;
      run.trajectory = static_cast<int>(t);
      run.point = static_cast<int>(m);
      run.overrides = map_to_physical(chosen[t].points[m], space, base);
      res.runs.push_back(std::move(run));
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= res.runs.size()) {
        return;
      }
      CampaignRun& run = res.runs[i];
      try {
        auto values = model(run.overrides);
        bool ok = values.size() == settings.outputs.size();
        for (const auto& v : values) {
          ok = ok && v.size() == settings.times.size();
        }
        if (ok) {
          run.values = std::move(values);
        } else {
          run.error = "model returned values of the wrong shape";
        }
      } catch (const std::exception& e) {
        run.error = e.what();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(settings.workers, static_cast<int>(res.runs.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) {
    pool.emplace_back(worker);
  }
  worker();
  for (auto& t : pool) {
    t.join();
  }
  res.summary = summarize_campaign(space, settings, chosen, res.runs);
  return res;
}

ModelFn simulation_model(const SimulationConfig& base, const std::vector<std::string>& outputs,
                         const std::vector<double>& times) {
  for (const auto& o : outputs) {
    record_value(StepRecord{}, o);
  }
  return [base, outputs, times](const std::vector<std::pair<std::string, double>>& overrides) {
    SimulationConfig cfg = base;
    for (const auto& [key, value] : overrides) {
      apply_override(cfg.params, key, value);
    }
    RunOptions opts;
    opts.write_files = false;
    const OutputSeries series = run(cfg, opts);
    std::vector<std::vector<double>> values(outputs.size(), std::vector<double>(times.size()));
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      const StepRecord* best = &series.records.front();
      for (const auto& r : series.records) {
        if (std::fabs(r.time - times[ti]) < std::fabs(best->time - times[ti])) {
          best = &r;
        }
      }
      for (std::size_t o = 0; o < outputs.size(); ++o) {
        values[o][ti] = record_value(*best, outputs[o]);
      }
    }
    return values;
  };
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) {
    throw InputError("cannot write " + p.string());
  }
  return out;
}

}  // namespace

void write_report(const std::filesystem::path& dir, const InputSpace& space, const CampaignResult& result) {
  std::filesystem::create_directories(dir);
  const EeSummary& s = result.summary;
  {
    auto out = open_out(dir / "summary.csv");
    out << "output,input,time_h,mu_star,sigma,mu_star_norm,sigma_norm,effects,missing\n";
    for (std::size_t o = 0; o < s.outputs.size(); ++o) {
      for (std::size_t t = 0; t < s.times.size(); ++t) {
        for (std::size_t i = 0; i < s.inputs.size(); ++i) {
          const EeStats& st = s.stats[o][t][i];
          const double mn = s.mu_max[o] > 0.0 ? st.mu_star / s.mu_max[o] : 0.0;
          out << s.outputs[o] << ',' << s.inputs[i] << ',' << fmt(s.times[t]) << ',' << fmt(st.mu_star) << ',';
          if (st.sigma) {
            out << fmt(*st.sigma) << ',' << fmt(mn) << ','
                << fmt(s.sigma_max[o] > 0.0 ? *st.sigma / s.sigma_max[o] : 0.0);
          } else {
            out << "nan," << fmt(mn) << ",nan";
          }
          out << ',' << st.count << ',' << st.missing << '\n';
        }
      }
    }
  }
  {
    auto out = open_out(dir / "trajectories.csv");
    out << "selection,trajectory,point,varied_input,sign";
    for (const auto& in : space.inputs) {
      out << ',' << in.name;
    }
    out << '\n';
    for (std::size_t sel = 0; sel < result.selected.size(); ++sel) {
      const Trajectory& t = result.trajectories[static_cast<std::size_t>(result.selected[sel])];
      for (std::size_t m = 0; m < t.points.size(); ++m) {
        out << sel << ',' << result.selected[sel] << ',' << m << ','
            << (m == 0 ? std::string("-") : space.inputs[static_cast<std::size_t>(t.order[m - 1])].name) << ','
            << (m == 0 ? 0 : t.signs[m - 1]);
        for (double u : t.points[m]) {
          out << ',' << fmt(u);
        }
        out << '\n';
      }
    }
  }
  {
    auto out = open_out(dir / "runs.csv");
    out << "selection,point,status";
    for (const auto& in : space.inputs) {
      out << ',' << in.name;
    }
    for (const auto& o : s.outputs) {
      for (double t : s.times) {
        out << ',' << o << '@' << fmt(t) << 'h';
      }
    }
    out << '\n';
    for (const auto& run : result.runs) {
      out << run.trajectory << ',' << run.point << ',' << (run.values ? "ok" : "failed");
      for (const auto& [key, v] : run.overrides) {
        out << ',' << fmt(v);
      }
      for (std::size_t o = 0; o < s.outputs.size(); ++o) {
        for (std::size_t t = 0; t < s.times.size(); ++t) {
          out << ',' << (run.values ? fmt((*run.values)[o][t]) : std::string("nan"));
        }
      }
      out << '\n';
    }
  }
  const double tmax = s.times.empty() ? 1.0 : *std::max_element(s.times.begin(), s.times.end());
  for (std::size_t o = 0; o < s.outputs.size(); ++o) {
    std::vector<ScatterPoint> pts;
    for (std::size_t t = 0; t < s.times.size(); ++t) {
      for (std::size_t i = 0; i < s.inputs.size(); ++i) {
        const EeStats& st = s.stats[o][t][i];
        if (!st.sigma || !std::isfinite(st.mu_star)) {
          continue;
        }
        ScatterPoint p;
        p.x = s.mu_max[o] > 0.0 ? st.mu_star / s.mu_max[o] : 0.0;
        p.y = s.sigma_max[o] > 0.0 ? *st.sigma / s.sigma_max[o] : 0.0;
        p.size = tmax > 0.0 ? s.times[t] / tmax : 1.0;
        p.label = s.inputs[i];
        p.group = static_cast<int>(i);
        pts.push_back(p);
      }
    }
    auto out = open_out(dir / ("scatter_" + s.outputs[o] + ".svg"));
    out << scatter_svg(pts, s.outputs[o] + " (mu*_max = " + fmt(s.mu_max[o]) + ", sigma_max = " +
                                fmt(s.sigma_max[o]) + ")",
                       "mu* / mu*_max", "sigma / sigma_max");
  }
}

}  // namespace angio
