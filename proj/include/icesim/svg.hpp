#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace icesim {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Plain SVG line chart with axis ticks and a legend.
void write_line_plot(const std::filesystem::path& path, const std::string& title, const std::string& xlabel,
                     const std::vector<PlotSeries>& series);

}  // namespace icesim
