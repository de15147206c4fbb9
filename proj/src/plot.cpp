#include "heatlab/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace heatlab {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const std::vector<Series>& series, PlotStyle style, const PlotOptions& opt) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  std::size_t points = 0;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("render_svg: series '" + s.name + "' has ragged data");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      double y = s.y[i];
      if (opt.log_y) {
        if (!(y > 0)) throw std::invalid_argument("render_svg: log scale needs positive values");
        y = std::log10(y);
      }
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
      ++points;
    }
  }
  if (points == 0) throw std::invalid_argument("render_svg: nothing to draw");
  if (x1 == x0) { x0 -= 0.5; x1 += 0.5; }
  if (y1 == y0) { y0 -= 0.5; y1 += 0.5; }

  const double left = 70, right = 150, top = 40, bottom = 50;
  const double w = opt.width - left - right;
  const double h = opt.height - top - bottom;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * w; };
  auto py = [&](double y) { return top + h - ((opt.log_y ? std::log10(y) : y) - y0) / (y1 - y0) * h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\"" << opt.height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opt.title.empty())
    svg << "<text x=\"" << fmt(left + w / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
        << escape(opt.title) << "</text>\n";
  svg << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(w) << "\" height=\"" << fmt(h)
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int t = 0; t <= 4; ++t) {
    const double fx = x0 + (x1 - x0) * t / 4.0;
    svg << "<text x=\"" << fmt(px(fx)) << "\" y=\"" << fmt(top + h + 18) << "\" text-anchor=\"middle\">"
        << tick_label(fx) << "</text>\n";
    const double fy = y0 + (y1 - y0) * t / 4.0;
    const double ypix = top + h - (fy - y0) / (y1 - y0) * h;
    svg << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(ypix + 4) << "\" text-anchor=\"end\">"
        << tick_label(opt.log_y ? std::pow(10.0, fy) : fy) << "</text>\n";
  }
  if (!opt.x_label.empty())
    svg << "<text x=\"" << fmt(left + w / 2) << "\" y=\"" << fmt(opt.height - 10.0)
        << "\" text-anchor=\"middle\">" << escape(opt.x_label) << "</text>\n";
  if (!opt.y_label.empty())
    svg << "<text x=\"16\" y=\"" << fmt(top + h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << fmt(top + h / 2) << ")\">" << escape(opt.y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % (sizeof kPalette / sizeof *kPalette)];
    if (style == PlotStyle::line && s.x.size() > 1) {
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) svg << (i ? " " : "") << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i]));
      svg << "\"/>\n";
    } else {
      for (std::size_t i = 0; i < s.x.size(); ++i)
        svg << "<circle cx=\"" << fmt(px(s.x[i])) << "\" cy=\"" << fmt(py(s.y[i])) << "\" r=\"3\" fill=\"" << color
            << "\"/>\n";
    }
    const double ly = top + 14 + 18.0 * static_cast<double>(k);
    svg << "<rect x=\"" << fmt(left + w + 12) << "\" y=\"" << fmt(ly - 9) << "\" width=\"12\" height=\"12\" fill=\""
        << color << "\"/>\n";
    svg << "<text x=\"" << fmt(left + w + 30) << "\" y=\"" << fmt(ly + 1) << "\">" << escape(s.name) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_plot(const std::vector<Series>& series, PlotStyle style, const std::string& path, const PlotOptions& opt) {
  const std::string text = render_svg(series, style, opt);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_plot: cannot open " + path);
  out << text;
  if (!out) throw std::runtime_error("emit_plot: write failed for " + path);
}

}  // namespace heatlab
