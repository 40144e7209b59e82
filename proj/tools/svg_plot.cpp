// Copyright 2026 The randstep Authors
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "cli.hpp"

namespace randstep::cli {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 130.0;
constexpr double kTop = 20.0;
constexpr double kBottom = 50.0;

char const* color_for(StepScheme s)
{
    switch (s) {
        case StepScheme::RandomizedBackwardEuler: return "#1f77b4";
        case StepScheme::ClassicalBackwardEuler: return "#d62728";
        case StepScheme::RandomizedForwardEuler: return "#2ca02c";
    }
    return "#000000";
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

}  // namespace

std::string render_svg_loglog(ErrorTable const& table, ErrorMode mode)
{
    if (table.rows.empty()) throw UsageError("svg: empty error table");

    // Preserve first-appearance order of schemes.
    std::vector<StepScheme> order;
    std::map<StepScheme, std::vector<std::pair<double, double>>> series;
    for (auto const& row : table.rows) {
        double const e = mode == ErrorMode::FinalTime ? row.rms_error_final : row.rms_error_max;
        if (!(e > 0) || !std::isfinite(e) || !(row.step_size > 0)) {
            throw UsageError("svg: errors must be positive and finite for a log-log plot");
        }
        if (!series.contains(row.scheme)) order.push_back(row.scheme);
        series[row.scheme].emplace_back(std::log2(row.step_size), std::log2(e));
    }

    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (auto const& [s, pts] : series) {
        for (auto const& [x, y] : pts) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    if (xmax - xmin < 1e-12) {
        xmin -= 1.0;
        xmax += 1.0;
    }
    if (ymax - ymin < 1e-12) {
        ymin -= 1.0;
        ymax += 1.0;
    }
    double const pw = kWidth - kLeft - kRight;
    double const ph = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * ph; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    svg << "<defs><clipPath id=\"plot\"><rect x=\"" << kLeft << "\" y=\"" << kTop
        << "\" width=\"" << pw << "\" height=\"" << ph << "\"/></clipPath></defs>\n";
    svg << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" fill=\"white\"/>\n";
    svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\""
        << ph << "\" fill=\"none\" stroke=\"black\"/>\n";

    // Integer ticks on both log2 axes.
    for (int t = static_cast<int>(std::ceil(xmin)); t <= static_cast<int>(std::floor(xmax)); ++t) {
        svg << "<text x=\"" << fmt(px(t)) << "\" y=\"" << fmt(kHeight - kBottom + 18)
            << "\" font-size=\"11\" text-anchor=\"middle\">2^" << t << "</text>\n";
    }
    int const ystep = std::max(1, static_cast<int>(std::ceil((ymax - ymin) / 10.0)));
    for (int t = static_cast<int>(std::ceil(ymin)); t <= static_cast<int>(std::floor(ymax)); t += ystep) {
        svg << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(py(t) + 4)
            << "\" font-size=\"11\" text-anchor=\"end\">2^" << t << "</text>\n";
    }
    svg << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << fmt(kHeight - 10)
        << "\" font-size=\"12\" text-anchor=\"middle\">step size k</text>\n";
    svg << "<text x=\"16\" y=\"" << fmt(kTop + ph / 2) << "\" font-size=\"12\" "
        << "text-anchor=\"middle\" transform=\"rotate(-90 16 " << fmt(kTop + ph / 2)
        << ")\">rms error</text>\n";

    // Reference slopes through the coarsest point of the first series.
    auto const& anchor = series[order.front()].front();
    int legend = 0;
    for (double slope : {0.5, 1.0}) {
        double const y0 = anchor.second + slope * (xmin - anchor.first);
        double const y1 = anchor.second + slope * (xmax - anchor.first);
        svg << "<line x1=\"" << fmt(px(xmin)) << "\" y1=\"" << fmt(py(y0)) << "\" x2=\""
            << fmt(px(xmax)) << "\" y2=\"" << fmt(py(y1))
            << "\" stroke=\"gray\" stroke-dasharray=\"6,4\" clip-path=\"url(#plot)\"/>\n";
        svg << "<text x=\"" << fmt(kWidth - kRight + 10) << "\" y=\"" << fmt(kTop + 14 + 16 * legend++)
            << "\" font-size=\"11\" fill=\"gray\">slope " << (slope == 0.5 ? "0.5" : "1") << "</text>\n";
    }

    for (StepScheme s : order) {
        svg << "<polyline fill=\"none\" stroke=\"" << color_for(s) << "\" stroke-width=\"2\" points=\"";
        bool first = true;
        for (auto const& [x, y] : series[s]) {
            svg << (first ? "" : " ") << fmt(px(x)) << ',' << fmt(py(y));
            first = false;
        }
        svg << "\"/>\n";
        svg << "<text x=\"" << fmt(kWidth - kRight + 10) << "\" y=\"" << fmt(kTop + 14 + 16 * legend++)
            << "\" font-size=\"11\" fill=\"" << color_for(s) << "\">" << scheme_id(s) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void emit_svg_loglog(ErrorTable const& table, std::string const& path, ErrorMode mode)
{
    std::string const svg = render_svg_loglog(table, mode);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("svg: cannot open '" + path + "' for writing");
    out << svg;
}

}  // namespace randstep::cli
