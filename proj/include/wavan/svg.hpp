#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "wavan/common.hpp"
#include "wavan/wavelet.hpp"

namespace wavan {

struct HeatmapOptions {
    std::string title;
    bool log_color = false;
    std::size_t max_columns = 1024;  // translations are block-averaged down to this
};

namespace detail {

inline std::string color_stop(double t) {
    // dark blue -> teal -> green -> yellow
    struct Stop {
        double pos;
        int r, g, b;
    };
    static const Stop stops[] = {
        {0.00, 13, 8, 135},
        {0.33, 24, 120, 150},
        {0.66, 60, 180, 90},
        {1.00, 245, 230, 60},
    };
    t = std::clamp(t, 0.0, 1.0);
    const Stop* a = &stops[0];
    const Stop* b = &stops[3];
    for (std::size_t i = 0; i + 1 < 4; ++i)
        if (t >= stops[i].pos && t <= stops[i + 1].pos) {
            a = &stops[i];
            b = &stops[i + 1];
            break;
        }
    double u = (t - a->pos) / (b->pos - a->pos + 1e-300);
    auto mix = [&](int x, int y) { return static_cast<int>(std::lround(x + (y - x) * u)); };
    std::ostringstream os;
    os << "rgb(" << mix(a->r, b->r) << "," << mix(a->g, b->g) << "," << mix(a->b, b->b) << ")";
    return os.str();
}

inline std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

}  // namespace detail

// Static heatmap of a column-major (n x |grid|) matrix: translations on x,
// inverse width 1/lambda on y (one row per scale, largest 1/lambda on top),
// cone of influence hatched.
inline std::string render_heatmap(const std::vector<double>& values, std::size_t n,
                                  const ScaleGrid& grid, const std::vector<int>& coi_radii,
                                  const HeatmapOptions& options = {}) {
    const std::size_t n_scales = grid.size();
    const std::size_t cols = std::min(options.max_columns, n);
    const double block = static_cast<double>(n) / static_cast<double>(cols);

    // block-averaged display matrix, rows ordered smallest k (largest 1/lambda) first
    std::vector<double> cells(cols * n_scales, 0.0);
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (std::size_t s = 0; s < n_scales; ++s) {
        for (std::size_t c = 0; c < cols; ++c) {
            std::size_t m0 = static_cast<std::size_t>(std::floor(block * static_cast<double>(c)));
            std::size_t m1 = static_cast<std::size_t>(std::floor(block * static_cast<double>(c + 1)));
            m1 = std::max(m1, m0 + 1);
            m1 = std::min(m1, n);
            double sum = 0.0;
            for (std::size_t m = m0; m < m1; ++m) sum += values[s * n + m];
            double v = sum / static_cast<double>(m1 - m0);
            if (options.log_color) v = std::log10(std::max(std::abs(v), 1e-300));
            cells[s * cols + c] = v;
            if (first) {
                lo = hi = v;
                first = false;
            } else {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
    }
    const double span = hi - lo > 0.0 ? hi - lo : 1.0;

    const double cell_w = std::max(1.0, 900.0 / static_cast<double>(cols));
    const double cell_h = std::max(6.0, 420.0 / static_cast<double>(n_scales));
    const double plot_w = cell_w * static_cast<double>(cols);
    const double plot_h = cell_h * static_cast<double>(n_scales);
    const double margin_left = 90.0, margin_top = 40.0, margin_bottom = 50.0, margin_right = 20.0;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << plot_w + margin_left + margin_right
        << "\" height=\"" << plot_h + margin_top + margin_bottom << "\">\n";
    svg << "<defs><pattern id=\"coi\" width=\"6\" height=\"6\" patternTransform=\"rotate(45)\" "
           "patternUnits=\"userSpaceOnUse\"><line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" "
           "stroke=\"white\" stroke-width=\"2\" opacity=\"0.55\"/></pattern></defs>\n";
    if (!options.title.empty())
        svg << "<text x=\"" << margin_left << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">"
            << options.title << "</text>\n";

    // cells; row 0 at the top = smallest k = largest 1/lambda
    for (std::size_t s = 0; s < n_scales; ++s) {
        double y = margin_top + cell_h * static_cast<double>(s);
        for (std::size_t c = 0; c < cols; ++c) {
            double t = (cells[s * cols + c] - lo) / span;
            svg << "<rect x=\"" << margin_left + cell_w * static_cast<double>(c) << "\" y=\"" << y
                << "\" width=\"" << cell_w + 0.5 << "\" height=\"" << cell_h + 0.5 << "\" fill=\""
                << detail::color_stop(t) << "\"/>\n";
        }
    }
    // COI hatching: one rect per side per row
    for (std::size_t s = 0; s < n_scales; ++s) {
        double y = margin_top + cell_h * static_cast<double>(s);
        double r = static_cast<double>(coi_radii[s]);
        double w = std::min(plot_w, r / static_cast<double>(n) * plot_w);
        if (w <= 0.0) continue;
        svg << "<rect x=\"" << margin_left << "\" y=\"" << y << "\" width=\"" << w
            << "\" height=\"" << cell_h + 0.5 << "\" fill=\"url(#coi)\"/>\n";
        svg << "<rect x=\"" << margin_left + plot_w - w << "\" y=\"" << y << "\" width=\"" << w
            << "\" height=\"" << cell_h + 0.5 << "\" fill=\"url(#coi)\"/>\n";
    }

    // y ticks: a few scales
    svg << "<text x=\"12\" y=\"" << margin_top + plot_h / 2.0
        << "\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 12,"
        << margin_top + plot_h / 2.0 << ")\" text-anchor=\"middle\">1/lambda (1/s)</text>\n";
    std::size_t tick_step = std::max<std::size_t>(1, n_scales / 6);
    for (std::size_t s = 0; s < n_scales; s += tick_step) {
        double y = margin_top + cell_h * (static_cast<double>(s) + 0.5);
        svg << "<text x=\"" << margin_left - 6 << "\" y=\"" << y + 4
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
            << detail::fmt_tick(grid.inv_lambda(s)) << "</text>\n";
    }
    // x ticks
    svg << "<text x=\"" << margin_left + plot_w / 2.0 << "\" y=\""
        << margin_top + plot_h + 36 << "\" font-family=\"sans-serif\" font-size=\"12\" "
        << "text-anchor=\"middle\">tau (s)</text>\n";
    for (int i = 0; i <= 4; ++i) {
        double frac = static_cast<double>(i) / 4.0;
        double tau = frac * static_cast<double>(n - 1) * grid.dt;
        svg << "<text x=\"" << margin_left + frac * plot_w << "\" y=\""
            << margin_top + plot_h + 16 << "\" font-family=\"sans-serif\" font-size=\"11\" "
            << "text-anchor=\"middle\">" << detail::fmt_tick(tau) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

// Log-log polyline plot of one or more spectra (frequency or 1/lambda axis).
struct CurveData {
    std::string label;
    std::string color = "steelblue";
    std::vector<double> x, y;
};

inline std::string render_loglog_curves(const std::vector<CurveData>& curves,
                                        const std::string& title, const std::string& x_label,
                                        const std::string& y_label) {
    double x_lo = 0, x_hi = 0, y_lo = 0, y_hi = 0;
    bool first = true;
    for (const auto& c : curves)
        for (std::size_t i = 0; i < c.x.size(); ++i) {
            if (!(c.x[i] > 0.0) || !(c.y[i] > 0.0)) continue;
            double lx = std::log10(c.x[i]), ly = std::log10(c.y[i]);
            if (first) {
                x_lo = x_hi = lx;
                y_lo = y_hi = ly;
                first = false;
            } else {
                x_lo = std::min(x_lo, lx);
                x_hi = std::max(x_hi, lx);
                y_lo = std::min(y_lo, ly);
                y_hi = std::max(y_hi, ly);
            }
        }
    if (first) {
        x_lo = y_lo = 0;
        x_hi = y_hi = 1;
    }
    if (x_hi - x_lo < 1e-12) x_hi = x_lo + 1;
    if (y_hi - y_lo < 1e-12) y_hi = y_lo + 1;

    const double w = 640, h = 420, ml = 70, mt = 40, mb = 50, mr = 20;
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w + ml + mr << "\" height=\""
        << h + mt + mb << "\">\n";
    svg << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << w << "\" height=\"" << h
        << "\" fill=\"white\" stroke=\"black\"/>\n";
    if (!title.empty())
        svg << "<text x=\"" << ml << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">"
            << title << "</text>\n";
    auto px = [&](double lx) { return ml + (lx - x_lo) / (x_hi - x_lo) * w; };
    auto py = [&](double ly) { return mt + h - (ly - y_lo) / (y_hi - y_lo) * h; };
    int legend_row = 0;
    for (const auto& c : curves) {
        svg << "<polyline fill=\"none\" stroke=\"" << c.color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < c.x.size(); ++i) {
            if (!(c.x[i] > 0.0) || !(c.y[i] > 0.0)) continue;
            svg << px(std::log10(c.x[i])) << "," << py(std::log10(c.y[i])) << " ";
        }
        svg << "\"/>\n";
        svg << "<text x=\"" << ml + w - 150 << "\" y=\"" << mt + 18 + 16 * legend_row
            << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << c.color << "\">"
            << c.label << "</text>\n";
        ++legend_row;
    }
    for (int i = 0; i <= 4; ++i) {
        double lx = x_lo + (x_hi - x_lo) * i / 4.0;
        double ly = y_lo + (y_hi - y_lo) * i / 4.0;
        svg << "<text x=\"" << px(lx) << "\" y=\"" << mt + h + 16
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">1e"
            << detail::fmt_tick(lx) << "</text>\n";
        svg << "<text x=\"" << ml - 6 << "\" y=\"" << py(ly) + 4
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">1e"
            << detail::fmt_tick(ly) << "</text>\n";
    }
    svg << "<text x=\"" << ml + w / 2 << "\" y=\"" << mt + h + 40
        << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" << x_label
        << "</text>\n";
    svg << "<text x=\"16\" y=\"" << mt + h / 2
        << "\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16,"
        << mt + h / 2 << ")\" text-anchor=\"middle\">" << y_label << "</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace wavan
