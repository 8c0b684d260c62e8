#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace rtsim {

/// Minimal static SVG charts. Enough for run reports; not a plotting library.
struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

void write_line_chart(const std::filesystem::path& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<SvgSeries>& series);

void write_bar_chart(const std::filesystem::path& path, const std::string& title,
                     const std::vector<std::string>& labels, const std::vector<double>& values);

}  // namespace rtsim
