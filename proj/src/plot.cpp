#include "drtsoh/plot.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "drtsoh/errors.hpp"
#include "drtsoh/io.hpp"

namespace drtsoh::plot {

namespace {

const char* kPalette[8] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                           "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

struct Range {
    double lo = 0.0, hi = 1.0;

    void expand(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
};

} // namespace

std::string render_svg(const std::vector<Series>& series, const PlotOptions& options) {
    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
    bool first = true;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (first) {
                xmin = xmax = s.x[i];
                ymin = ymax = s.y[i];
                first = false;
            } else {
                xmin = std::min(xmin, s.x[i]);
                xmax = std::max(xmax, s.x[i]);
                ymin = std::min(ymin, s.y[i]);
                ymax = std::max(ymax, s.y[i]);
            }
        }
    }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;

    const double margin = 56.0;
    const double w = options.width, h = options.height;
    const double plot_w = w - 2 * margin, plot_h = h - 2 * margin;
    auto sx = [&](double x) { return margin + (x - xmin) / (xmax - xmin) * plot_w; };
    auto sy = [&](double y) { return h - margin - (y - ymin) / (ymax - ymin) * plot_h; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
        << options.height << "\" data-xmin=\"" << io::dtostr(xmin) << "\" data-xmax=\""
        << io::dtostr(xmax) << "\" data-ymin=\"" << io::dtostr(ymin) << "\" data-ymax=\""
        << io::dtostr(ymax) << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<line x1=\"" << margin << "\" y1=\"" << h - margin << "\" x2=\"" << w - margin
        << "\" y2=\"" << h - margin << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
        << h - margin << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << w / 2 << "\" y=\"" << h - 12 << "\" text-anchor=\"middle\">"
        << options.x_label << "</text>\n";
    svg << "<text x=\"16\" y=\"" << h / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << h / 2 << ")\">"
        << options.y_label << "</text>\n";
    svg << "<text x=\"" << margin << "\" y=\"" << h - margin + 18
        << "\" text-anchor=\"middle\" font-size=\"11\">" << io::dtostr(xmin) << "</text>\n";
    svg << "<text x=\"" << w - margin << "\" y=\"" << h - margin + 18
        << "\" text-anchor=\"middle\" font-size=\"11\">" << io::dtostr(xmax) << "</text>\n";
    svg << "<text x=\"" << margin - 6 << "\" y=\"" << h - margin
        << "\" text-anchor=\"end\" font-size=\"11\">" << io::dtostr(ymin) << "</text>\n";
    svg << "<text x=\"" << margin - 6 << "\" y=\"" << margin + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << io::dtostr(ymax) << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const Series& s = series[si];
        if (s.x.empty()) continue;
        svg << "<polyline fill=\"none\" stroke=\"" << kPalette[si % 8]
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (i) svg << ' ';
            svg << io::dtostr(sx(s.x[i])) << ',' << io::dtostr(sy(s.y[i]));
        }
        svg << "\"/>\n";
        svg << "<text x=\"" << w - margin + 4 << "\" y=\"" << margin + 16.0 * (si + 1)
            << "\" font-size=\"11\" fill=\"" << kPalette[si % 8] << "\">" << s.label
            << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_svg(const std::filesystem::path& path, const std::vector<Series>& series,
               const PlotOptions& options) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path.string());
    out << render_svg(series, options);
}

void write_series_csv(const std::filesystem::path& path, const std::vector<Series>& series) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path.string());
    out << "series,x,y\n";
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            out << s.label << ',' << io::dtostr(s.x[i]) << ',' << io::dtostr(s.y[i]) << '\n';
        }
    }
}

} // namespace drtsoh::plot
