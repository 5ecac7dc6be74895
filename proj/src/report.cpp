#include "fraudlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fraudlab {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 400;
constexpr int kMargin = 48;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

class Svg {
 public:
  explicit Svg(const std::string& title) {
    body_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
          << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
          << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight
          << "\">\n"
          << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
          << "\" fill=\"white\"/>\n"
          << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
          << "font-family=\"sans-serif\" font-size=\"16\">" << escape_xml(title)
          << "</text>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& fill) {
    body_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w)
          << "\" height=\"" << num(h) << "\" fill=\"" << fill << "\"/>\n";
  }

  void circle(double x, double y, double r, const std::string& fill) {
    body_ << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"" << num(r)
          << "\" fill=\"" << fill << "\"/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke) {
    body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : pts) body_ << num(x) << ',' << num(y) << ' ';
    body_ << "\"/>\n";
  }

  void text(double x, double y, const std::string& s, int size = 11,
            const std::string& anchor = "middle") {
    body_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" text-anchor=\"" << anchor
          << "\" font-family=\"sans-serif\" font-size=\"" << size << "\">" << escape_xml(s)
          << "</text>\n";
  }

  void save(const std::string& path) {
    body_ << "</svg>\n";
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << body_.str();
  }

 private:
  std::ostringstream body_;
};

// map a data value into plot-area pixels
double px(double v, double lo, double hi, double p0, double p1) {
  if (hi <= lo) return 0.5 * (p0 + p1);
  return p0 + (v - lo) / (hi - lo) * (p1 - p0);
}

}  // namespace

std::vector<std::size_t> histogram_counts(const std::vector<double>& values,
                                          const HistogramSpec& spec) {
  if (spec.bins == 0) throw std::invalid_argument("histogram needs at least one bin");
  std::vector<std::size_t> counts(spec.bins, 0);
  const double width = (spec.hi - spec.lo) / static_cast<double>(spec.bins);
  for (double v : values) {
    std::ptrdiff_t b = width > 0.0
                           ? static_cast<std::ptrdiff_t>(std::floor((v - spec.lo) / width))
                           : 0;
    b = std::clamp<std::ptrdiff_t>(b, 0, static_cast<std::ptrdiff_t>(spec.bins) - 1);
    ++counts[static_cast<std::size_t>(b)];
  }
  return counts;
}

void write_histogram_svg(const std::string& path, const std::string& title,
                         const std::vector<double>& values, const HistogramSpec& spec) {
  const auto counts = histogram_counts(values, spec);
  const double maxc = static_cast<double>(std::max<std::size_t>(
      1, *std::max_element(counts.begin(), counts.end())));
  Svg svg(title);
  const double bw = static_cast<double>(kWidth - 2 * kMargin) / static_cast<double>(spec.bins);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double h = static_cast<double>(counts[i]) / maxc * (kHeight - 2 * kMargin);
    svg.rect(kMargin + static_cast<double>(i) * bw, kHeight - kMargin - h,
             std::max(1.0, bw - 1.0), h, "#4878a8");
  }
  svg.text(kMargin, kHeight - 12, num(spec.lo), 11, "start");
  svg.text(kWidth - kMargin, kHeight - 12, num(spec.hi), 11, "end");
  svg.save(path);
}

void write_bar_svg(const std::string& path, const std::string& title,
                   const std::vector<std::string>& labels,
                   const std::vector<double>& values) {
  if (labels.size() != values.size()) {
    throw std::invalid_argument("bar chart labels/values length mismatch");
  }
  Svg svg(title);
  const double maxv = values.empty() ? 1.0
                                     : std::max(1e-300, *std::max_element(values.begin(),
                                                                          values.end()));
  const double bw = values.empty()
                        ? 0.0
                        : static_cast<double>(kWidth - 2 * kMargin) /
                              static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double h = std::max(0.0, values[i]) / maxv * (kHeight - 2 * kMargin);
    const double x = kMargin + static_cast<double>(i) * bw;
    svg.rect(x, kHeight - kMargin - h, std::max(1.0, bw - 2.0), h, "#6a9955");
    svg.text(x + bw / 2, kHeight - kMargin + 14, labels[i], 10);
    svg.text(x + bw / 2, kHeight - kMargin - h - 4, num(values[i]), 10);
  }
  svg.save(path);
}

void write_line_svg(const std::string& path, const std::string& title,
                    const std::vector<std::string>& series_names,
                    const std::vector<std::vector<double>>& series) {
  if (series_names.size() != series.size()) {
    throw std::invalid_argument("line chart names/series length mismatch");
  }
  static const char* kColors[] = {"#d0453e", "#4878a8", "#6a9955", "#9467bd"};
  double lo = 0.0, hi = 1.0;
  bool first = true;
  std::size_t max_len = 1;
  for (const auto& s : series) {
    max_len = std::max(max_len, s.size());
    for (double v : s) {
      if (first) {
        lo = hi = v;
        first = false;
      } else {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  if (hi == lo) hi = lo + 1.0;
  Svg svg(title);
  for (std::size_t s = 0; s < series.size(); ++s) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < series[s].size(); ++i) {
      pts.emplace_back(px(static_cast<double>(i), 0.0, static_cast<double>(max_len - 1),
                          kMargin, kWidth - kMargin),
                       px(series[s][i], lo, hi, kHeight - kMargin, kMargin));
    }
    if (!pts.empty()) svg.polyline(pts, kColors[s % 4]);
    svg.text(kWidth - kMargin, kMargin + 14.0 * static_cast<double>(s), series_names[s], 11,
             "end");
  }
  svg.text(kMargin, kHeight - 12, num(lo), 11, "start");
  svg.text(kMargin, kMargin - 6, num(hi), 11, "start");
  svg.save(path);
}

void write_scatter_svg(const std::string& path, const std::string& title,
                       const std::vector<double>& xs, const std::vector<double>& ys,
                       const std::vector<bool>& highlight) {
  if (xs.size() != ys.size() || (!highlight.empty() && highlight.size() != xs.size())) {
    throw std::invalid_argument("scatter input length mismatch");
  }
  double xlo = 0, xhi = 1, ylo = 0, yhi = 1;
  if (!xs.empty()) {
    xlo = *std::min_element(xs.begin(), xs.end());
    xhi = *std::max_element(xs.begin(), xs.end());
    ylo = *std::min_element(ys.begin(), ys.end());
    yhi = *std::max_element(ys.begin(), ys.end());
    if (xhi == xlo) xhi = xlo + 1;
    if (yhi == ylo) yhi = ylo + 1;
  }
  Svg svg(title);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!highlight.empty() && highlight[i]) continue;
    svg.circle(px(xs[i], xlo, xhi, kMargin, kWidth - kMargin),
               px(ys[i], ylo, yhi, kHeight - kMargin, kMargin), 1.2, "#9bb7d4");
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (highlight.empty() || !highlight[i]) continue;
    svg.circle(px(xs[i], xlo, xhi, kMargin, kWidth - kMargin),
               px(ys[i], ylo, yhi, kHeight - kMargin, kMargin), 2.2, "#d0453e");
  }
  svg.save(path);
}

void write_heat_table_svg(const std::string& path, const std::string& title,
                          const std::vector<std::string>& labels,
                          const std::vector<std::vector<double>>& matrix) {
  const std::size_t k = matrix.size();
  if (labels.size() != k) throw std::invalid_argument("heat table labels/matrix mismatch");
  Svg svg(title);
  if (k > 0) {
    const double cell = std::min((kWidth - 2.0 * kMargin) / static_cast<double>(k),
                                 (kHeight - 2.0 * kMargin) / static_cast<double>(k));
    for (std::size_t r = 0; r < k; ++r) {
      svg.text(kMargin - 6, kMargin + (static_cast<double>(r) + 0.65) * cell, labels[r], 9,
               "end");
      svg.text(kMargin + (static_cast<double>(r) + 0.5) * cell, kMargin - 8, labels[r], 9);
      for (std::size_t c = 0; c < matrix[r].size(); ++c) {
        const double v = matrix[r][c];
        std::string fill = "#c0c0c0";  // NaN
        if (std::isfinite(v)) {
          const int shade = static_cast<int>(std::clamp((v + 1.0) / 2.0, 0.0, 1.0) * 255.0);
          char buf[10];
          std::snprintf(buf, sizeof buf, "#%02x60%02x", 255 - shade, shade);
          fill = buf;
        }
        const double x = kMargin + static_cast<double>(c) * cell;
        const double y = kMargin + static_cast<double>(r) * cell;
        svg.rect(x, y, cell - 1, cell - 1, fill);
        svg.text(x + cell / 2, y + cell * 0.6, std::isfinite(v) ? num(v) : "n/a", 9);
      }
    }
  }
  svg.save(path);
}

}  // namespace fraudlab
