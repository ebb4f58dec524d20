#include "cyberevent/report.h"

#include <algorithm>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "cyberevent/errors.h"

namespace cyber {
namespace {

constexpr double kWidth = 640, kHeight = 360, kMargin = 48;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string header(const std::string& title) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"24\" font-size=\"14\">{3}</text>\n"
      "<line x1=\"{2}\" y1=\"{4}\" x2=\"{5}\" y2=\"{4}\" stroke=\"black\"/>\n"
      "<line x1=\"{2}\" y1=\"{6}\" x2=\"{2}\" y2=\"{4}\" stroke=\"black\"/>\n",
      kWidth, kHeight, kMargin, escape(title), kHeight - kMargin, kWidth - kMargin, kMargin);
}

}  // namespace

std::string metrics_table(const std::vector<std::pair<std::string, MetricsReport>>& rows) {
  std::string out = fmt::format("{:<16} {:>8} {:>9} {:>8} {:>8} {:>6} {:>6} {:>6} {:>6}\n",
                                "", "accuracy", "precision", "recall", "f1", "tp", "fp", "tn",
                                "fn");
  for (const auto& [name, m] : rows) {
    out += fmt::format("{:<16} {:>8.4f} {:>9.4f} {:>8.4f} {:>8.4f} {:>6} {:>6} {:>6} {:>6}\n",
                       name, m.accuracy, m.precision, m.recall, m.f1, m.confusion.tp,
                       m.confusion.fp, m.confusion.tn, m.confusion.fn);
  }
  return out;
}

std::string line_chart_svg(const std::string& title, const std::vector<Series>& series) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  std::size_t n = 0;
  for (const auto& s : series) {
    for (double v : s.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    n = std::max(n, s.values.size());
  }
  if (n == 0) return header(title) + "</svg>\n";
  if (hi - lo < 1e-12) hi = lo + 1.0;
  const double plot_w = kWidth - 2 * kMargin, plot_h = kHeight - 2 * kMargin;
  std::string svg = header(title);
  svg += fmt::format("<text x=\"4\" y=\"{}\">{:.3g}</text>\n", kMargin + 4, hi);
  svg += fmt::format("<text x=\"4\" y=\"{}\">{:.3g}</text>\n", kHeight - kMargin, lo);
  for (std::size_t k = 0; k < series.size(); ++k) {
    std::string pts;
    for (std::size_t i = 0; i < series[k].values.size(); ++i) {
      const double x = kMargin + (n == 1 ? 0.0 : plot_w * static_cast<double>(i) /
                                                     static_cast<double>(n - 1));
      const double y = kHeight - kMargin - plot_h * (series[k].values[i] - lo) / (hi - lo);
      pts += fmt::format("{:.2f},{:.2f} ", x, y);
    }
    const char* color = kColors[k % 5];
    svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>\n",
                       color, pts);
    svg += fmt::format("<text x=\"{}\" y=\"{}\" fill=\"{}\">{}</text>\n", kWidth - kMargin - 120,
                       kMargin + 16 * static_cast<double>(k + 1), color, escape(series[k].name));
  }
  return svg + "</svg>\n";
}

std::string bar_chart_svg(const std::string& title,
                          const std::vector<std::pair<std::string, double>>& bars) {
  std::string svg = header(title);
  if (bars.empty()) return svg + "</svg>\n";
  double hi = 0;
  for (const auto& b : bars) hi = std::max(hi, b.second);
  if (hi <= 0) hi = 1;
  const double plot_w = kWidth - 2 * kMargin, plot_h = kHeight - 2 * kMargin;
  const double slot = plot_w / static_cast<double>(bars.size());
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const double h = plot_h * std::max(0.0, bars[i].second) / hi;
    const double x = kMargin + slot * static_cast<double>(i) + slot * 0.15;
    svg += fmt::format(
        "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n", x,
        kHeight - kMargin - h, slot * 0.7, h, kColors[0]);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{:.3f}</text>\n", x,
                       kHeight - kMargin - h - 4, bars[i].second);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", x, kHeight - kMargin + 16,
                       escape(bars[i].first));
  }
  return svg + "</svg>\n";
}

std::string ablation_svg(const AblationTable& table) {
  std::vector<std::pair<std::string, double>> bars;
  for (const auto& r : table.rows) bars.emplace_back(r.name, r.mean_accuracy());
  return bar_chart_svg("Contextual feature combinations (mean test accuracy)", bars);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << content;
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace cyber
