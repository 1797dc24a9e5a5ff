#pragma once

#include <string>
#include <vector>

namespace regpot {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool markers = false;  // draw points instead of a polyline
};

struct PlotSpec {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    bool log_x = false;
    bool log_y = false;
    int width = 800;
    int height = 480;
};

/// Standalone SVG 1.1 document: axes with ticks, one polyline per series
/// drawn from a fixed palette, legend in the top-right corner.
std::string render_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series);

/// Affine rescale of y into [0, 1] so fields of different magnitude share axes.
std::vector<double> normalize_unit(const std::vector<double>& y);

}  // namespace regpot
