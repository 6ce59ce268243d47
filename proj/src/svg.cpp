#include "rwre/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "rwre/csv.hpp"

namespace rwre::io {

namespace {
const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}
}  // namespace

void SvgPlot::add_reference_line(double intercept, double slope, std::string label) {
    ref_lines_.push_back({intercept, slope, std::move(label)});
}

std::string SvgPlot::render() const {
    const int width = 640, height = 440;
    const int ml = 70, mr = 20, mt = 40, mb = 50;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    auto tx = [&](double x) { return loglog_ ? std::log10(x) : x; };
    auto ty = [&](double y) { return loglog_ ? std::log10(y) : y; };
    for (const auto& s : series_) {
        for (auto [x, y] : s.points) {
            if (loglog_ && (x <= 0 || y <= 0)) continue;
            xmin = std::min(xmin, tx(x));
            xmax = std::max(xmax, tx(x));
            ymin = std::min(ymin, ty(y));
            ymax = std::max(ymax, ty(y));
        }
    }
    if (!(xmin < xmax)) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (!(ymin < ymax)) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    const double xpad = 0.05 * (xmax - xmin), ypad = 0.08 * (ymax - ymin);
    xmin -= xpad;
    xmax += xpad;
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double x) { return ml + (tx(x) - xmin) / (xmax - xmin) * (width - ml - mr); };
    auto py = [&](double y) { return height - mb - (ty(y) - ymin) / (ymax - ymin) * (height - mt - mb); };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + std::to_string(width / 2) + "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"15\">" + title_ + "</text>\n";
    // axes
    out += "<line x1=\"" + std::to_string(ml) + "\" y1=\"" + std::to_string(height - mb) +
           "\" x2=\"" + std::to_string(width - mr) + "\" y2=\"" + std::to_string(height - mb) +
           "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + std::to_string(ml) + "\" y1=\"" + std::to_string(mt) + "\" x2=\"" +
           std::to_string(ml) + "\" y2=\"" + std::to_string(height - mb) + "\" stroke=\"black\"/>\n";
    // axis ticks: 5 per axis
    for (int i = 0; i <= 4; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 4.0;
        const double fy = ymin + (ymax - ymin) * i / 4.0;
        const double sx = ml + (width - ml - mr) * i / 4.0;
        const double sy = height - mb - (height - mt - mb) * i / 4.0;
        out += "<text x=\"" + fmt(sx) + "\" y=\"" + std::to_string(height - mb + 18) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               (loglog_ ? ("1e" + fmt(fx)) : fmt(fx)) + "</text>\n";
        out += "<text x=\"" + std::to_string(ml - 6) + "\" y=\"" + fmt(sy + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
               (loglog_ ? ("1e" + fmt(fy)) : fmt(fy)) + "</text>\n";
    }
    out += "<text x=\"" + std::to_string(width / 2) + "\" y=\"" + std::to_string(height - 12) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" + x_label_ +
           "</text>\n";
    out += "<text x=\"16\" y=\"" + std::to_string(height / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           "transform=\"rotate(-90 16 " + std::to_string(height / 2) + ")\">" + y_label_ + "</text>\n";

    for (const auto& r : ref_lines_) {
        const double y1 = r.intercept + r.slope * xmin;
        const double y2 = r.intercept + r.slope * xmax;
        auto pyr = [&](double y) {
            return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb);
        };
        out += "<line x1=\"" + std::to_string(ml) + "\" y1=\"" + fmt(pyr(y1)) + "\" x2=\"" +
               std::to_string(width - mr) + "\" y2=\"" + fmt(pyr(y2)) +
               "\" stroke=\"#888\" stroke-dasharray=\"5,4\"/>\n";
    }

    int color = 0;
    int legend_y = mt + 6;
    for (const auto& s : series_) {
        const char* c = kColors[color % 6];
        std::string pts;
        for (auto [x, y] : s.points) {
            if (loglog_ && (x <= 0 || y <= 0)) continue;
            pts += fmt(px(x)) + "," + fmt(py(y)) + " ";
            out += "<circle cx=\"" + fmt(px(x)) + "\" cy=\"" + fmt(py(y)) + "\" r=\"3\" fill=\"" +
                   c + "\"/>\n";
        }
        out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + c + "\"/>\n";
        out += "<text x=\"" + std::to_string(width - mr - 4) + "\" y=\"" + std::to_string(legend_y) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" + c +
               "\">" + s.label + "</text>\n";
        legend_y += 15;
        ++color;
    }
    out += "</svg>\n";
    return out;
}

void SvgPlot::write_atomic(const std::string& path) const {
    write_file_atomic(path, render());
}

}  // namespace rwre::io
