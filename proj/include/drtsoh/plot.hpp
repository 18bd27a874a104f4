#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace drtsoh::plot {

struct Series {
    std::string label;
    std::vector<double> x, y;
};

struct PlotOptions {
    std::string x_label = "x";
    std::string y_label = "y";
    int width = 720;
    int height = 480;
};

// Static SVG with one polyline per series. The viewport covers the data
// extrema exactly; the ranges are exposed as data-* attributes on the root
// element for downstream checks.
std::string render_svg(const std::vector<Series>& series, const PlotOptions& options = {});

void write_svg(const std::filesystem::path& path, const std::vector<Series>& series,
               const PlotOptions& options = {});

/// Long-format CSV bundle: `series,x,y`.
void write_series_csv(const std::filesystem::path& path, const std::vector<Series>& series);

} // namespace drtsoh::plot
