#pragma once

// Minimal self-contained SVG charts.

#include <string>
#include <vector>

namespace heatlab {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

enum class PlotStyle { line, scatter };

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  int width = 640;
  int height = 420;
};

/// Deterministic SVG text; identical inputs give identical bytes. Throws
/// std::invalid_argument when there is no point to draw or when log_y meets
/// a nonpositive value.
std::string render_svg(const std::vector<Series>& series, PlotStyle style, const PlotOptions& opt = {});

void emit_plot(const std::vector<Series>& series, PlotStyle style, const std::string& path,
               const PlotOptions& opt = {});

}  // namespace heatlab
