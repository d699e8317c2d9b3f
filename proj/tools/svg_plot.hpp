#pragma once

#include <string>
#include <vector>

namespace camwsol::cli {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool polyline = false;  // otherwise scatter points
};

/// A self-contained SVG chart with axes, tick labels and one mark layer per
/// series. Output depends only on the arguments.
std::string svg_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                     const std::vector<Series>& series);

}  // namespace camwsol::cli
