#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

namespace nevlab::io {

// Shortest representation that round-trips a double exactly.
std::string format_double(double x);

// CSV with one leading comment line carrying the config hash and the seed
// (plus a timestamp unless suppressed for reproducible runs), then a header
// row, then data rows. Numeric cells are written round-trip exact, so a run
// repeated with the same seed produces a byte-identical file.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& config_hash,
            std::uint64_t seed, bool with_timestamp);

  void header(const std::vector<std::string>& names);
  void row(const std::vector<double>& values);
  // For series keyed by a label (estimate name, component, method).
  void row_tagged(const std::string& tag, const std::vector<double>& values);
  // Fully general row; numeric cells should come through format_double.
  void row_cells(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
  std::size_t n_columns_ = 0;
};

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<std::pair<double, double>> shaded_x;  // exceptional cells
  int width = 960;
  int height = 560;
};

// Minimal standalone SVG line plot: axes, ticks, one polyline per series,
// legend, optional shaded vertical bands.
void write_svg_plot(const std::filesystem::path& path, const std::vector<Series>& series,
                    const PlotOptions& opts);

}  // namespace nevlab::io
