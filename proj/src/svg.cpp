#include "mvsne/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace mvsne {

namespace {

const char* kPalette[] = {"#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00",
                          "#a65628", "#f781bf", "#999999", "#66c2a5", "#e78ac3"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
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

}  // namespace

std::string render_scatter(const std::vector<ScatterPoint>& points,
                           const std::vector<std::string>& class_names,
                           const ScatterOptions& options) {
    if (points.empty()) throw DataError("nothing to plot");
    for (const auto& p : points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw DataError("non-finite coordinate in plot input");
        if (p.label >= static_cast<int>(class_names.size()))
            throw DataError("point label out of range");
    }

    double min_x = points[0].x, max_x = points[0].x;
    double min_y = points[0].y, max_y = points[0].y;
    for (const auto& p : points) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    const double span_x = max_x - min_x > 0.0 ? max_x - min_x : 1.0;
    const double span_y = max_y - min_y > 0.0 ? max_y - min_y : 1.0;
    const double w = options.width, h = options.height, m = options.margin;
    auto sx = [&](double x) { return m + (x - min_x) / span_x * (w - 2.0 * m); };
    // SVG y grows downward; flip so larger coordinates plot higher
    auto sy = [&](double y) { return h - m - (y - min_y) / span_y * (h - 2.0 * m); };

    auto color_of = [&](int label, bool train) -> std::string {
        if (!train && options.black_test_squares) return "#000000";
        if (label < 0) return "#444444";
        return kPalette[static_cast<std::size_t>(label) % kPaletteSize];
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fmt(w) +
           "\" height=\"" + fmt(h) + "\" viewBox=\"0 0 " + fmt(w) + " " + fmt(h) + "\">\n";
    svg += "<rect width=\"" + fmt(w) + "\" height=\"" + fmt(h) + "\" fill=\"#ffffff\"/>\n";
    if (!options.title.empty())
        svg += "<text x=\"" + fmt(w / 2.0) +
               "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" "
               "text-anchor=\"middle\">" +
               escape_xml(options.title) + "</text>\n";

    for (const auto& p : points) {
        const std::string c = color_of(p.label, p.train);
        if (p.train) {
            svg += "<circle cx=\"" + fmt(sx(p.x)) + "\" cy=\"" + fmt(sy(p.y)) +
                   "\" r=\"3.5\" fill=\"" + c + "\" fill-opacity=\"0.85\"/>\n";
        } else {
            svg += "<rect x=\"" + fmt(sx(p.x) - 3.0) + "\" y=\"" + fmt(sy(p.y) - 3.0) +
                   "\" width=\"6\" height=\"6\" fill=\"" + c + "\" fill-opacity=\"0.85\"/>\n";
        }
    }

    // Legend: one entry per class present in the input.
    std::vector<std::uint8_t> present(class_names.size(), 0);
    for (const auto& p : points)
        if (p.label >= 0) present[static_cast<std::size_t>(p.label)] = 1;
    double ly = m;
    const double lx = w - m - 110.0;
    for (std::size_t k = 0; k < class_names.size(); ++k) {
        if (!present[k]) continue;
        svg += "<circle cx=\"" + fmt(lx) + "\" cy=\"" + fmt(ly) + "\" r=\"5\" fill=\"" +
               kPalette[k % kPaletteSize] + "\"/>\n";
        svg += "<text x=\"" + fmt(lx + 12.0) + "\" y=\"" + fmt(ly + 4.0) +
               "\" font-family=\"sans-serif\" font-size=\"13\">" + escape_xml(class_names[k]) +
               "</text>\n";
        ly += 20.0;
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace mvsne
