#pragma once

// Minimal log-log line chart writer. Output depends only on the input series: no
// timestamps, fixed number formatting, series drawn in the order given.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

namespace bpsk::svg {

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points; ///< (x, y), both > 0 to be drawn
    bool dashed = false;
};

struct ChartOptions {
    std::string x_label = "alpha^2";
    std::string y_label = "error probability";
    int width = 760;
    int height = 480;
};

namespace detail {

inline constexpr std::array<const char*, 10> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                                      "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

struct Range {
    int lo = 0; ///< decade exponent
    int hi = 0;
};

inline Range decade_range(double vmin, double vmax, Range fallback) {
    if (!(vmin > 0.0) || !std::isfinite(vmin) || !std::isfinite(vmax)) return fallback;
    Range r{static_cast<int>(std::floor(std::log10(vmin))), static_cast<int>(std::ceil(std::log10(vmax)))};
    if (r.hi <= r.lo) r.hi = r.lo + 1;
    return r;
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

} // namespace detail

/// Render the series on log10 axes. Axis limits snap to whole decades around the positive
/// data; with no drawable data the axes span [1e-2, 1e1] x [1e-6, 1e0].
inline std::string render_loglog(const std::vector<Series>& series, const ChartOptions& opt = {}) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = 0.0;
    double ymin = std::numeric_limits<double>::infinity(), ymax = 0.0;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) continue;
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    const detail::Range xr = detail::decade_range(xmin, xmax, {-2, 1});
    const detail::Range yr = detail::decade_range(ymin, ymax, {-6, 0});

    const double left = 80, right = 190, top = 30, bottom = 60;
    const double pw = opt.width - left - right;
    const double ph = opt.height - top - bottom;
    auto px = [&](double x) { return left + (std::log10(x) - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto py = [&](double y) { return top + (yr.hi - std::log10(y)) / (yr.hi - yr.lo) * ph; };

    std::string out;
    out += fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
                       opt.width, opt.height, opt.width, opt.height);
    out += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", opt.width, opt.height);
    out += "<g font-family=\"sans-serif\" font-size=\"11\">\n";

    // grid and tick labels
    for (int k = xr.lo; k <= xr.hi; ++k) {
        const double x = px(std::pow(10.0, k));
        out += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#dddddd\"/>\n", x, top, x,
                           top + ph);
        out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">1e{}</text>\n", x, top + ph + 16, k);
    }
    for (int k = yr.lo; k <= yr.hi; ++k) {
        const double y = py(std::pow(10.0, k));
        out += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#dddddd\"/>\n", left, y,
                           left + pw, y);
        out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">1e{}</text>\n", left - 6, y + 4, k);
    }
    out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" stroke=\"black\"/>\n",
                       left, top, pw, ph);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", left + pw / 2,
                       opt.height - 18.0, detail::escape(opt.x_label));
    out += fmt::format("<text x=\"18\" y=\"{:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.2f})\">{}</text>\n",
                       top + ph / 2, top + ph / 2, detail::escape(opt.y_label));

    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        const char* colour = detail::kPalette[i % detail::kPalette.size()];
        std::string pts;
        for (const auto& [x, y] : s.points) {
            if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) continue;
            if (!pts.empty()) pts += ' ';
            pts += fmt::format("{:.2f},{:.2f}", px(x), py(y));
        }
        out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{} points=\"{}\"/>\n", colour,
                           s.dashed ? " stroke-dasharray=\"5,3\"" : "", pts);
        const double ly = top + 14.0 + 18.0 * static_cast<double>(i);
        const double lx = left + pw + 14.0;
        out += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" stroke-width=\"1.5\"{}/>\n",
                           lx, ly, lx + 22.0, ly, colour, s.dashed ? " stroke-dasharray=\"5,3\"" : "");
        out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", lx + 28.0, ly + 4.0, detail::escape(s.label));
    }
    out += "</g>\n</svg>\n";
    return out;
}

} // namespace bpsk::svg
