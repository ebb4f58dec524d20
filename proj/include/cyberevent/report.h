#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cyberevent/ablation.h"
#include "cyberevent/metrics.h"

namespace cyber {

std::string metrics_table(const std::vector<std::pair<std::string, MetricsReport>>& rows);

// Minimal standalone SVG charts.
struct Series {
  std::string name;
  std::vector<double> values;
};
std::string line_chart_svg(const std::string& title, const std::vector<Series>& series);
std::string bar_chart_svg(const std::string& title,
                          const std::vector<std::pair<std::string, double>>& bars);
std::string ablation_svg(const AblationTable& table);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace cyber
