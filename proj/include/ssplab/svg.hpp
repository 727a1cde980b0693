// Minimal static SVG line charts for aggregate series. Self-contained text
// emission: no external renderer, deterministic output for fixed inputs.
#pragma once

#include "ssplab/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace ssplab {

struct SvgSeries {
    std::string label;
    numvec y; ///< sampled at x = 1..y.size()
};

namespace detail {

inline std::string svg_num(prec_t x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

/// Largest "nice" step (1, 2, or 5 times a power of ten) not above `raw`.
inline prec_t nice_step(prec_t raw) {
    if (!(raw > 0)) return 1;
    const prec_t mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (prec_t m : {5.0, 2.0, 1.0})
        if (m * mag <= raw) return m * mag;
    return mag / 2;
}

} // namespace detail

/// Renders the series as one SVG line chart. X is the 1-based sample index;
/// long series are stride-subsampled to at most one point per pixel.
inline std::string render_line_chart(const std::string& title, const std::string& x_label,
                                     const std::string& y_label,
                                     const std::vector<SvgSeries>& series, int width = 760,
                                     int height = 460) {
    static const char* const palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                          "#9467bd", "#ff7f0e", "#8c564b"};
    constexpr int n_colors = 6;
    const int ml = 72, mr = 24, mt = 44, mb = 52; // margins
    const prec_t pw = width - ml - mr, ph = height - mt - mb;

    std::size_t n_max = 1;
    prec_t y_min = 0, y_max = 1;
    bool any = false;
    for (const SvgSeries& s : series) {
        n_max = std::max(n_max, s.y.size());
        for (prec_t v : s.y) {
            if (!std::isfinite(v)) continue;
            y_min = any ? std::min(y_min, v) : std::min(v, 0.0);
            y_max = any ? std::max(y_max, v) : v;
            any = true;
        }
    }
    if (!any || y_max <= y_min) y_max = y_min + 1;

    const auto px = [&](prec_t k) {
        return ml + pw * (n_max == 1 ? 0.5 : (k - 1) / static_cast<prec_t>(n_max - 1));
    };
    const auto py = [&](prec_t v) { return mt + ph * (1 - (v - y_min) / (y_max - y_min)); };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\" font-family=\"sans-serif\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + std::to_string(width / 2) +
           "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + title + "</text>\n";

    // Gridlines and y ticks.
    const prec_t ystep = detail::nice_step((y_max - y_min) / 5);
    for (prec_t v = std::ceil(y_min / ystep) * ystep; v <= y_max + 1e-12 * ystep; v += ystep) {
        const prec_t y = py(v);
        out += "<line x1=\"" + std::to_string(ml) + "\" y1=\"" + detail::svg_num(y) + "\" x2=\"" +
               std::to_string(width - mr) + "\" y2=\"" + detail::svg_num(y) +
               "\" stroke=\"#dddddd\"/>\n";
        out += "<text x=\"" + std::to_string(ml - 8) + "\" y=\"" + detail::svg_num(y + 4) +
               "\" text-anchor=\"end\" font-size=\"11\">" + detail::svg_num(v) + "</text>\n";
    }
    // X ticks.
    const prec_t xstep = detail::nice_step(static_cast<prec_t>(n_max) / 6);
    for (prec_t k = xstep; k <= static_cast<prec_t>(n_max) + 1e-9; k += xstep) {
        const prec_t x = px(k);
        out += "<line x1=\"" + detail::svg_num(x) + "\" y1=\"" + std::to_string(height - mb) +
               "\" x2=\"" + detail::svg_num(x) + "\" y2=\"" +
               std::to_string(height - mb + 5) + "\" stroke=\"#444444\"/>\n";
        out += "<text x=\"" + detail::svg_num(x) + "\" y=\"" + std::to_string(height - mb + 18) +
               "\" text-anchor=\"middle\" font-size=\"11\">" + detail::svg_num(k) + "</text>\n";
    }
    // Axes.
    out += "<line x1=\"" + std::to_string(ml) + "\" y1=\"" + std::to_string(mt) + "\" x2=\"" +
           std::to_string(ml) + "\" y2=\"" + std::to_string(height - mb) +
           "\" stroke=\"#444444\"/>\n";
    out += "<line x1=\"" + std::to_string(ml) + "\" y1=\"" + std::to_string(height - mb) +
           "\" x2=\"" + std::to_string(width - mr) + "\" y2=\"" + std::to_string(height - mb) +
           "\" stroke=\"#444444\"/>\n";
    out += "<text x=\"" + std::to_string(width / 2) + "\" y=\"" + std::to_string(height - 12) +
           "\" text-anchor=\"middle\" font-size=\"12\">" + x_label + "</text>\n";
    out += "<text x=\"18\" y=\"" + std::to_string(height / 2) +
           "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 18 " +
           std::to_string(height / 2) + ")\">" + y_label + "</text>\n";

    // Series polylines (subsampled to at most one point per pixel).
    for (std::size_t i = 0; i < series.size(); ++i) {
        const SvgSeries& s = series[i];
        if (s.y.empty()) continue;
        const std::size_t stride =
            std::max<std::size_t>(1, s.y.size() / static_cast<std::size_t>(pw));
        std::string pts;
        for (std::size_t j = 0; j < s.y.size(); j += stride) {
            pts += detail::svg_num(px(static_cast<prec_t>(j + 1))) + "," +
                   detail::svg_num(py(s.y[j])) + " ";
        }
        pts += detail::svg_num(px(static_cast<prec_t>(s.y.size()))) + "," +
               detail::svg_num(py(s.y.back()));
        out += "<polyline fill=\"none\" stroke=\"" + std::string(palette[i % n_colors]) +
               "\" stroke-width=\"1.6\" points=\"" + pts + "\"/>\n";
        // Legend row.
        const int ly = mt + 10 + static_cast<int>(i) * 18;
        out += "<line x1=\"" + std::to_string(width - mr - 150) + "\" y1=\"" +
               std::to_string(ly) + "\" x2=\"" + std::to_string(width - mr - 126) + "\" y2=\"" +
               std::to_string(ly) + "\" stroke=\"" + palette[i % n_colors] +
               "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + std::to_string(width - mr - 120) + "\" y=\"" +
               std::to_string(ly + 4) + "\" font-size=\"12\">" + s.label + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

} // namespace ssplab
