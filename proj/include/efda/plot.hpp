#pragma once

#include "efda/table.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace efda {

enum class PlotKind { Line, Bar };

// What to draw from a CSV table. Line charts put x_column on the horizontal
// axis and draw one polyline per distinct series_column value; bar charts use
// x_column as categories with one bar per series value.
struct PlotSpec {
  PlotKind kind = PlotKind::Line;
  std::string title;
  std::string x_column;
  std::string y_column;
  std::string series_column = "method";
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  double y_scale = 1.0;  // multiply y values, e.g. 100 for percentages
  // Optional dashed reference line taken from another column (one value per x).
  std::string reference_column;
  std::string reference_label;
};

// Named layouts: sweep_n, sweep_alpha, efficiency_variance, efficiency_mse,
// ablation, bench_ece, bench_accuracy.
PlotSpec plot_preset(std::string_view name);
std::vector<std::string> plot_preset_names();

// Self-contained SVG; identical input gives identical bytes.
std::string render_svg(const CsvData& csv, const PlotSpec& spec);

}  // namespace efda
