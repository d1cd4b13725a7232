#include "swipt/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace swipt {

double plot_half_range(const Constellation& c) {
    double reach = std::sqrt(std::max(c.mean_power(), 0.0));
    for (const auto& p : c.points) reach = std::max({reach, std::abs(p.real()), std::abs(p.imag())});
    if (reach == 0.0) reach = 1.0;
    return 1.15 * reach;
}

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

}  // namespace

std::string render_constellation_svg(const Constellation& c, int size_px, const std::string& title) {
    const double size = size_px;
    const double margin = 0.08 * size;
    const double half = plot_half_range(c);
    const double px_per_unit = (size / 2.0 - margin) / half;
    const double cx = size / 2.0;
    const double cy = size / 2.0;
    auto sx = [&](double re) { return cx + re * px_per_unit; };
    auto sy = [&](double im) { return cy - im * px_per_unit; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size_px << "\" height=\"" << size_px
        << "\" viewBox=\"0 0 " << size_px << ' ' << size_px << "\">\n";
    svg << "<rect x=\"0\" y=\"0\" width=\"" << size_px << "\" height=\"" << size_px
        << "\" fill=\"white\"/>\n";
    svg << "<rect class=\"frame\" x=\"" << num(margin) << "\" y=\"" << num(margin) << "\" width=\""
        << num(size - 2 * margin) << "\" height=\"" << num(size - 2 * margin)
        << "\" fill=\"none\" stroke=\"#444\"/>\n";
    svg << "<line class=\"axis\" x1=\"" << num(margin) << "\" y1=\"" << num(cy) << "\" x2=\""
        << num(size - margin) << "\" y2=\"" << num(cy) << "\" stroke=\"#999\"/>\n";
    svg << "<line class=\"axis\" x1=\"" << num(cx) << "\" y1=\"" << num(margin) << "\" x2=\"" << num(cx)
        << "\" y2=\"" << num(size - margin) << "\" stroke=\"#999\"/>\n";
    const double radius = std::sqrt(std::max(c.mean_power(), 0.0));
    svg << "<circle class=\"reference\" cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\""
        << num(radius * px_per_unit) << "\" fill=\"none\" stroke=\"#c33\" stroke-dasharray=\"4 3\"/>\n";
    for (std::size_t k = 0; k < c.size(); ++k) {
        svg << "<circle class=\"marker\" cx=\"" << num(sx(c.points[k].real())) << "\" cy=\""
            << num(sy(c.points[k].imag())) << "\" r=\"4\" fill=\"#1f5fbf\"><title>" << k
            << "</title></circle>\n";
    }
    char label[96];
    std::snprintf(label, sizeof label, "half-range %.4g, ref radius %.4g", half, radius);
    svg << "<text x=\"" << num(margin) << "\" y=\"" << num(size - margin / 3) << "\" font-size=\"11\">"
        << label << "</text>\n";
    if (!title.empty()) {
        svg << "<text x=\"" << num(margin) << "\" y=\"" << num(margin * 0.7)
            << "\" font-size=\"13\">" << escape(title) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace swipt
