#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace angio {

/// Numeric CSV with a header row. "inf" and "nan" cells are accepted.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Throws InputError naming the available columns.
  std::vector<double> column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

struct LineSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Fixed 720x440 viewport; non-finite samples break the polyline.
std::string line_plot_svg(const std::vector<LineSeries>& series, const std::string& title,
                          const std::string& xlabel, const std::string& ylabel);

struct ScatterPoint {
  double x = 0.0;
  double y = 0.0;
  double size = 1.0;  // relative marker size in (0, 1]
  std::string label;
  int group = 0;  // colour index
};

std::string scatter_svg(const std::vector<ScatterPoint>& points, const std::string& title,
                        const std::string& xlabel, const std::string& ylabel);

/// One line per series file of `metric` against time in days.
void plot_series(const std::vector<std::filesystem::path>& csvs, const std::vector<std::string>& labels,
                 const std::string& metric, const std::filesystem::path& out);

}  // namespace angio
