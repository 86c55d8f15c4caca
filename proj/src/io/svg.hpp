#pragma once

#include <string>
#include <vector>

namespace adrceq {

struct PlotSeries {
    std::string name;
    const std::vector<double>* x = nullptr;
    const std::vector<double>* y = nullptr;
};

/// Minimal static line plot: axes, ticks, legend, one polyline per series.
std::string render_line_plot(const std::string& title, const std::string& x_label,
                             const std::string& y_label, const std::vector<PlotSeries>& series,
                             int width = 900, int height = 420);

void write_file(const std::string& path, const std::string& content);

} // namespace adrceq
