#pragma once

#include <string>
#include <vector>

namespace reglab {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool markers_only = false; // circles instead of a polyline
};

// Minimal self-contained line plot; CSV stays the contract, this is a
// convenience rendering.
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<PlotSeries>& series);

} // namespace reglab
