#pragma once

#include <string>
#include <vector>

#include "mfbo/linalg.hpp"

namespace mfbo::runner {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  // Optional symmetric band half-width around y (standard error shading).
  std::vector<double> band;
};

// Self-contained SVG line plot: axes, ticks, legend, optional shaded bands.
void write_line_plot_svg(const std::string& path, const std::string& title,
                         const std::string& x_label, const std::string& y_label,
                         const std::vector<PlotSeries>& series);

// Grouped bar chart of per-context action distributions (one group colour per
// context row).
void write_histogram_svg(const std::string& path, const std::string& title,
                         const Matrix& rows, const std::vector<std::string>& row_labels);

}  // namespace mfbo::runner
