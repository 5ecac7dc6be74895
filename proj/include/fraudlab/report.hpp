#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fraudlab {

struct HistogramSpec {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t bins = 20;
};

// counts per bin over [lo, hi); values outside the range clamp into the edge
// bins so every value is counted
std::vector<std::size_t> histogram_counts(const std::vector<double>& values,
                                          const HistogramSpec& spec);

void write_histogram_svg(const std::string& path, const std::string& title,
                         const std::vector<double>& values, const HistogramSpec& spec);

void write_bar_svg(const std::string& path, const std::string& title,
                   const std::vector<std::string>& labels,
                   const std::vector<double>& values);

// one polyline per series, shared x = index
void write_line_svg(const std::string& path, const std::string& title,
                    const std::vector<std::string>& series_names,
                    const std::vector<std::vector<double>>& series);

// 2-D scatter with an optional highlight overlay (e.g. flagged rows)
void write_scatter_svg(const std::string& path, const std::string& title,
                       const std::vector<double>& xs, const std::vector<double>& ys,
                       const std::vector<bool>& highlight);

// numeric matrix as a colored table; NaN cells render gray
void write_heat_table_svg(const std::string& path, const std::string& title,
                          const std::vector<std::string>& labels,
                          const std::vector<std::vector<double>>& matrix);

}  // namespace fraudlab
