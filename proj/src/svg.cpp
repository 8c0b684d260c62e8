#include "rtsim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace rtsim {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 420.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 50.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void include(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (lo > hi) {
      lo = 0.0;
      hi = 1.0;
    }
    if (lo == hi) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

}  // namespace

void write_line_chart(const std::filesystem::path& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<SvgSeries>& series) {
  Range xr, yr;
  for (const auto& s : series) {
    for (double v : s.x) xr.include(v);
    for (double v : s.y) yr.include(v);
  }
  xr.pad();
  yr.pad();

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto px = [&](double x) { return kMarginLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
  auto py = [&](double y) { return kMarginTop + (yr.hi - y) / (yr.hi - yr.lo) * plot_h; };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("svg: cannot write " + path.string());
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << kHeight
      << "' font-family='sans-serif' font-size='12'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<text x='" << kWidth / 2 << "' y='22' text-anchor='middle' font-size='15'>" << title
      << "</text>\n";
  out << "<rect x='" << kMarginLeft << "' y='" << kMarginTop << "' width='" << plot_w
      << "' height='" << plot_h << "' fill='none' stroke='#888'/>\n";

  for (int i = 0; i <= 4; ++i) {
    const double fy = yr.lo + (yr.hi - yr.lo) * i / 4.0;
    const double fx = xr.lo + (xr.hi - xr.lo) * i / 4.0;
    out << "<text x='" << kMarginLeft - 6 << "' y='" << py(fy) + 4
        << "' text-anchor='end'>" << fy << "</text>\n";
    out << "<text x='" << px(fx) << "' y='" << kHeight - kMarginBottom + 18
        << "' text-anchor='middle'>" << fx << "</text>\n";
  }
  out << "<text x='" << kWidth / 2 << "' y='" << kHeight - 12 << "' text-anchor='middle'>"
      << x_label << "</text>\n";
  out << "<text x='16' y='" << kHeight / 2 << "' text-anchor='middle' transform='rotate(-90 16 "
      << kHeight / 2 << ")'>" << y_label << "</text>\n";

  int color = 0;
  for (const auto& s : series) {
    out << "<polyline fill='none' stroke='" << kPalette[color % 6] << "' stroke-width='1.5' points='";
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
      out << px(s.x[i]) << "," << py(s.y[i]) << " ";
    out << "'/>\n";
    if (!s.label.empty())
      out << "<text x='" << kWidth - kMarginRight - 150 << "' y='" << kMarginTop + 16 + 16 * color
          << "' fill='" << kPalette[color % 6] << "'>" << s.label << "</text>\n";
    ++color;
  }
  out << "</svg>\n";
}

void write_bar_chart(const std::filesystem::path& path, const std::string& title,
                     const std::vector<std::string>& labels, const std::vector<double>& values) {
  Range yr;
  yr.include(0.0);
  for (double v : values) yr.include(v);
  yr.pad();

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto py = [&](double y) { return kMarginTop + (yr.hi - y) / (yr.hi - yr.lo) * plot_h; };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("svg: cannot write " + path.string());
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << kHeight
      << "' font-family='sans-serif' font-size='12'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<text x='" << kWidth / 2 << "' y='22' text-anchor='middle' font-size='15'>" << title
      << "</text>\n";

  const std::size_t n = std::max<std::size_t>(values.size(), 1);
  const double slot = plot_w / static_cast<double>(n);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x = kMarginLeft + slot * static_cast<double>(i) + slot * 0.15;
    const double y = py(std::max(values[i], 0.0));
    const double h = std::abs(py(0.0) - py(values[i]));
    out << "<rect x='" << x << "' y='" << y << "' width='" << slot * 0.7 << "' height='" << h
        << "' fill='" << kPalette[i % 6] << "'/>\n";
    out << "<text x='" << x + slot * 0.35 << "' y='" << kHeight - kMarginBottom + 18
        << "' text-anchor='middle'>" << (i < labels.size() ? labels[i] : "") << "</text>\n";
    out << "<text x='" << x + slot * 0.35 << "' y='" << y - 4 << "' text-anchor='middle'>"
        << values[i] << "</text>\n";
  }
  out << "<line x1='" << kMarginLeft << "' y1='" << py(0.0) << "' x2='" << kWidth - kMarginRight
      << "' y2='" << py(0.0) << "' stroke='#888'/>\n";
  out << "</svg>\n";
}

}  // namespace rtsim
