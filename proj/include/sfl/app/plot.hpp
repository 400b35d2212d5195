#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <span>
#include <string>

#include "sfl/core/error.hpp"
#include "sfl/core/matrix.hpp"

namespace sfl::app {

struct PlotLayout {
    double width = 640, height = 480;
    double left = 60, right = 150, top = 40, bottom = 50;

    double plot_w() const { return width - left - right; }
    double plot_h() const { return height - top - bottom; }
};

inline constexpr std::array<const char*, 3> kClassColors = {"#1b9e77", "#d95f02", "#7570b3"};
inline constexpr std::array<const char*, 3> kClassNames = {"no stress (0)", "medium stress (1)", "high stress (2)"};

namespace detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

inline std::string escape(const std::string& s) {
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

}  // namespace detail

/// Axis range padded by 5% of the data span on each side (±0.5 around a single value).
struct AxisRange {
    double lo;
    double hi;
};

inline AxisRange padded_range(std::span<const double> v) {
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    const double span = *mx - *mn;
    if (span <= 0.0) return {*mn - 0.5, *mx + 0.5};
    return {*mn - 0.05 * span, *mx + 0.05 * span};
}

/// Pixel position of data point (x, y); y grows upward in data space.
inline std::array<double, 2> to_pixels(double x, double y, AxisRange xr, AxisRange yr, const PlotLayout& l) {
    return {l.left + (x - xr.lo) / (xr.hi - xr.lo) * l.plot_w(), l.top + (yr.hi - y) / (yr.hi - yr.lo) * l.plot_h()};
}

/// Scatter plot of a 2-D embedding, one color per stress class.
inline std::string plot_embedding(const Matrix& coords, std::span<const int> labels, const std::string& title = "",
                                  const PlotLayout& l = {}) {
    require(coords.cols() == 2, ErrorKind::invalid_argument,
            "plot needs exactly 2 coordinate columns, got " + std::to_string(coords.cols()));
    require(coords.rows() > 0, ErrorKind::invalid_argument, "plot needs at least one point");
    require(labels.size() == coords.rows(), ErrorKind::invalid_argument, "labels do not match the coordinate rows");
    require_finite(coords, "plot coordinates");
    for (int c : labels) require(c >= 0 && c <= 2, ErrorKind::invalid_argument, "labels must lie in {0,1,2}");
    using detail::num;
    const auto xs = coords.column(0);
    const auto ys = coords.column(1);
    const auto xr = padded_range(xs);
    const auto yr = padded_range(ys);
    const double x0 = l.left, x1 = l.left + l.plot_w();
    const double y0 = l.top, y1 = l.top + l.plot_h();

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(l.width) + "\" height=\"" + num(l.height) +
         "\" viewBox=\"0 0 " + num(l.width) + " " + num(l.height) + "\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"" + num(l.width) + "\" height=\"" + num(l.height) + "\" fill=\"white\"/>\n";
    if (!title.empty())
        s += "<text x=\"" + num(l.left + l.plot_w() / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
             "font-size=\"14\">" + detail::escape(title) + "</text>\n";
    s += "<rect x=\"" + num(x0) + "\" y=\"" + num(y0) + "\" width=\"" + num(l.plot_w()) + "\" height=\"" +
         num(l.plot_h()) + "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    // Axis extremes as tick labels.
    const std::string font = "font-family=\"sans-serif\" font-size=\"11\"";
    s += "<text x=\"" + num(x0) + "\" y=\"" + num(y1 + 16) + "\" text-anchor=\"start\" " + font + ">" +
         detail::tick(xr.lo) + "</text>\n";
    s += "<text x=\"" + num(x1) + "\" y=\"" + num(y1 + 16) + "\" text-anchor=\"end\" " + font + ">" +
         detail::tick(xr.hi) + "</text>\n";
    s += "<text x=\"" + num(x0 - 6) + "\" y=\"" + num(y1) + "\" text-anchor=\"end\" " + font + ">" +
         detail::tick(yr.lo) + "</text>\n";
    s += "<text x=\"" + num(x0 - 6) + "\" y=\"" + num(y0 + 10) + "\" text-anchor=\"end\" " + font + ">" +
         detail::tick(yr.hi) + "</text>\n";
    s += "<text x=\"" + num(l.left + l.plot_w() / 2) + "\" y=\"" + num(l.height - 12) + "\" text-anchor=\"middle\" " +
         font + ">dim_0</text>\n";
    s += "<text x=\"16\" y=\"" + num(l.top + l.plot_h() / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         num(l.top + l.plot_h() / 2) + ")\" " + font + ">dim_1</text>\n";

    s += "<g fill-opacity=\"0.8\">\n";
    for (std::size_t i = 0; i < coords.rows(); ++i) {
        const auto p = to_pixels(xs[i], ys[i], xr, yr, l);
        s += "<circle cx=\"" + num(p[0]) + "\" cy=\"" + num(p[1]) + "\" r=\"3\" fill=\"" +
             kClassColors[static_cast<std::size_t>(labels[i])] + "\"/>\n";
    }
    s += "</g>\n";

    s += "<g class=\"legend\" " + font + ">\n";
    for (std::size_t c = 0; c < 3; ++c) {
        const double ly = l.top + 10 + 20.0 * static_cast<double>(c);
        const double lx = x1 + 14;
        s += "<rect x=\"" + num(lx) + "\" y=\"" + num(ly - 8) + "\" width=\"10\" height=\"10\" fill=\"" + kClassColors[c] +
             "\"/><text x=\"" + num(lx + 16) + "\" y=\"" + num(ly + 1) + "\">" + kClassNames[c] + "</text>\n";
    }
    s += "</g>\n</svg>\n";
    return s;
}

}  // namespace sfl::app
