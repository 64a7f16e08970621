#include "angio/plot.hpp"

#include "angio/common.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace angio {

std::vector<double> CsvTable::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) {
    std::string known;
    for (const auto& c : columns) {
      known += (known.empty() ? "" : ", ") + c;
    }
    throw InputError("unknown column '" + name + "'; available: " + known);
  }
  const auto idx = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    out.push_back(r[idx]);
  }
  return out;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') {
      cell.pop_back();
    }
    out.push_back(cell);
  }
  return out;
}

double cell_value(const std::string& s) {
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan" || s == "-nan" || s.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) {
    throw std::invalid_argument(s);
  }
  return v;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

struct Frame {
  double x0, x1, y0, y1;

  double sx(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double sy(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

// Pads degenerate ranges so that constant data still plots as a line.
std::pair<double, double> axis_range(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    return {0.0, 1.0};
  }
  if (hi - lo <= 1e-12 * std::max(1.0, std::fabs(hi))) {
    const double pad = std::max(1e-3, std::fabs(hi) * 0.1);
    return {lo - pad, hi + pad};
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

void axes(std::ostringstream& os, const Frame& f, const std::string& title, const std::string& xlabel,
          const std::string& ylabel) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << px(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
     << "</text>\n";
  const double xl = kLeft;
  const double xr = kWidth - kRight;
  const double yt = kTop;
  const double yb = kHeight - kBottom;
  os << "<rect x=\"" << px(xl) << "\" y=\"" << px(yt) << "\" width=\"" << px(xr - xl) << "\" height=\""
     << px(yb - yt) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = f.x0 + (f.x1 - f.x0) * i / 5.0;
    const double yv = f.y0 + (f.y1 - f.y0) * i / 5.0;
    os << "<line x1=\"" << px(f.sx(xv)) << "\" y1=\"" << px(yb) << "\" x2=\"" << px(f.sx(xv)) << "\" y2=\""
       << px(yb + 5) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << px(f.sx(xv)) << "\" y=\"" << px(yb + 18) << "\" text-anchor=\"middle\">" << num(xv)
       << "</text>\n";
    os << "<line x1=\"" << px(xl - 5) << "\" y1=\"" << px(f.sy(yv)) << "\" x2=\"" << px(xl) << "\" y2=\""
       << px(f.sy(yv)) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << px(xl - 8) << "\" y=\"" << px(f.sy(yv) + 4) << "\" text-anchor=\"end\">" << num(yv)
       << "</text>\n";
  }
  os << "<text x=\"" << px((xl + xr) / 2) << "\" y=\"" << px(kHeight - 18) << "\" text-anchor=\"middle\">"
     << escape(xlabel) << "</text>\n";
  os << "<text x=\"18\" y=\"" << px((yt + yb) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
     << px((yt + yb) / 2) << ")\">" << escape(ylabel) << "</text>\n";
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot read " + path.string());
  }
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) {
    throw InputError(path.string() + " is empty");
  }
  t.columns = split(line);
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line == "\r") {
      continue;
    }
    const auto cells = split(line);
    if (cells.size() != t.columns.size()) {
      throw InputError(path.string() + " line " + std::to_string(number) + ": expected " +
                       std::to_string(t.columns.size()) + " cells");
    }
    std::vector<double> row;
    for (const auto& c : cells) {
      try {
        row.push_back(cell_value(c));
      } catch (const std::exception&) {
        throw InputError(path.string() + " line " + std::to_string(number) + ": '" + c + "' is not a number");
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string line_plot_svg(const std::vector<LineSeries>& series, const std::string& title,
                          const std::string& xlabel, const std::string& ylabel) {
  double x0 = std::numeric_limits<double>::infinity();
  double x1 = -x0;
  double y0 = x0;
  double y1 = -x0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
        x0 = std::min(x0, s.x[i]);
        x1 = std::max(x1, s.x[i]);
        y0 = std::min(y0, s.y[i]);
        y1 = std::max(y1, s.y[i]);
      }
    }
  }
  const auto [ax0, ax1] = axis_range(x0, x1);
  const auto [ay0, ay1] = axis_range(y0, y1);
  const Frame f{ax0, ax1, ay0, ay1};
  std::ostringstream os;
  axes(os, f, title, xlabel, ylabel);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* colour = kPalette[k % kPalette.size()];
    std::string pts;
    auto flush = [&] {
      if (!pts.empty()) {
        os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"" << pts
           << "\"/>\n";
        pts.clear();
      }
    };
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        flush();
        continue;
      }
      pts += (pts.empty() ? "" : " ") + px(f.sx(s.x[i])) + "," + px(f.sy(s.y[i]));
    }
    flush();
    const double ly = kTop + 14.0 + 18.0 * static_cast<double>(k);
    os << "<line x1=\"" << px(kWidth - kRight + 12) << "\" y1=\"" << px(ly) << "\" x2=\"" << px(kWidth - kRight + 36)
       << "\" y2=\"" << px(ly) << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << px(kWidth - kRight + 42) << "\" y=\"" << px(ly + 4) << "\">" << escape(s.label)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string scatter_svg(const std::vector<ScatterPoint>& points, const std::string& title,
                        const std::string& xlabel, const std::string& ylabel) {
  double x1 = 0.0;
  double y1 = 0.0;
  for (const auto& p : points) {
    if (std::isfinite(p.x) && std::isfinite(p.y)) {
      x1 = std::max(x1, p.x);
      y1 = std::max(y1, p.y);
    }
  }
  const Frame f{0.0, x1 > 0.0 ? 1.1 * x1 : 1.0, 0.0, y1 > 0.0 ? 1.1 * y1 : 1.0};
  std::ostringstream os;
  axes(os, f, title, xlabel, ylabel);
  std::vector<std::pair<int, std::string>> legend;
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      continue;
    }
    const char* colour = kPalette[static_cast<std::size_t>(p.group) % kPalette.size()];
    os << "<circle cx=\"" << px(f.sx(p.x)) << "\" cy=\"" << px(f.sy(p.y)) << "\" r=\""
       << px(3.0 + 7.0 * std::clamp(p.size, 0.0, 1.0)) << "\" fill=\"" << colour
       << "\" fill-opacity=\"0.6\" stroke=\"" << colour << "\"><title>" << escape(p.label) << "</title></circle>\n";
    if (std::none_of(legend.begin(), legend.end(), [&](const auto& l) { return l.first == p.group; })) {
      legend.emplace_back(p.group, p.label);
    }
  }
  for (std::size_t k = 0; k < legend.size(); ++k) {
    const char* colour = kPalette[static_cast<std::size_t>(legend[k].first) % kPalette.size()];
    const double ly = kTop + 14.0 + 18.0 * static_cast<double>(k);
    os << "<circle cx=\"" << px(kWidth - kRight + 20) << "\" cy=\"" << px(ly) << "\" r=\"5\" fill=\"" << colour
       << "\"/>\n";
    os << "<text x=\"" << px(kWidth - kRight + 32) << "\" y=\"" << px(ly + 4) << "\">" << escape(legend[k].second)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void plot_series(const std::vector<std::filesystem::path>& csvs, const std::vector<std::string>& labels,
                 const std::string& metric, const std::filesystem::path& out) {
  if (csvs.empty()) {
    throw InputError("plot_series: no series given");
  }
  std::vector<LineSeries> lines;
  for (std::size_t i = 0; i < csvs.size(); ++i) {
    const CsvTable t = read_csv(csvs[i]);
    LineSeries s;
    s.label = i < labels.size() ? labels[i] : csvs[i].parent_path().filename().string();
    s.y = t.column(metric);
    s.x = t.column("time_h");
    for (double& x : s.x) {
      x /= 24.0;
    }
    lines.push_back(std::move(s));
  }
  std::ofstream os(out);
  if (!os) {
    throw InputError("cannot write " + out.string());
  }
  os << line_plot_svg(lines, metric, "time (days)", metric);
}

}  // namespace angio
