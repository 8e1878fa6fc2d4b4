#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "carbcast/csv.hpp"
#include "carbcast/date.hpp"
#include "carbcast/errors.hpp"

namespace carbcast {

/**
 * Minimal SVG line chart plus a companion CSV of the plotted values. Up to
 * a handful of series share the same date axis; missing alignment is the
 * caller's problem.
 */
inline void emit_series_plot(const std::vector<Date>& dates,
                             const std::vector<std::vector<double>>& series,
                             const std::vector<std::string>& labels, const std::string& title,
                             const std::filesystem::path& svg_path) {
    if (dates.empty() || series.empty()) throw DataError("emit_series_plot: empty series");
    if (series.size() != labels.size())
        throw ConfigError("emit_series_plot: one label per series required");
    for (const auto& s : series)
        if (s.size() != dates.size())
            throw ShapeError("emit_series_plot: series length does not match the date axis");

    double lo = series[0][0], hi = series[0][0];
    for (const auto& s : series)
        for (double v : s) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (hi == lo) {
        hi += 1.0;
        lo -= 1.0;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;

    constexpr double kWidth = 900.0, kHeight = 420.0;
    constexpr double kLeft = 70.0, kRight = 20.0, kTop = 40.0, kBottom = 50.0;
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    const auto x_at = [&](std::size_t i) {
        return dates.size() == 1
                   ? kLeft + plot_w / 2.0
                   : kLeft + plot_w * static_cast<double>(i) / static_cast<double>(dates.size() - 1);
    };
    const auto y_at = [&](double v) { return kTop + plot_h * (1.0 - (v - lo) / (hi - lo)); };

    static const char* kColors[] = {"#1f6fb2", "#d1495b", "#3f8f4e", "#8a6fb8", "#c88a2d", "#4a4a4a"};

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"900\" height=\"420\" "
           "viewBox=\"0 0 900 420\">\n";
    svg += "<rect width=\"900\" height=\"420\" fill=\"white\"/>\n";
    svg += "<text x=\"450\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">" + title + "</text>\n";

    // axes and y ticks
    char buf[160];
    for (int tick = 0; tick <= 4; ++tick) {
        const double v = lo + (hi - lo) * tick / 4.0;
        const double y = y_at(v);
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#dddddd\"/>\n",
                      kLeft, y, kWidth - kRight, y);
        svg += buf;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\" font-family=\"sans-serif\" "
                      "font-size=\"11\">%.4g</text>\n",
                      kLeft - 6.0, y + 4.0, v);
        svg += buf;
    }
    const int x_ticks = std::min<std::size_t>(6, dates.size());
    for (int tick = 0; tick < x_ticks; ++tick) {
        const std::size_t i = x_ticks == 1 ? 0 : (dates.size() - 1) * tick / (x_ticks - 1);
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\" "
                      "font-family=\"sans-serif\" font-size=\"11\">%s</text>\n",
                      x_at(i), kHeight - kBottom + 20.0, dates[i].to_string().c_str());
        svg += buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" "
                  "stroke=\"#333333\"/>\n",
                  kLeft, kTop, plot_w, plot_h);
    svg += buf;

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kColors[s % 6];
        if (dates.size() == 1) {
            std::snprintf(buf, sizeof(buf),
                          "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"4\" fill=\"%s\"/>\n", x_at(0),
                          y_at(series[s][0]), color);
            svg += buf;
        } else {
            svg += "<polyline fill=\"none\" stroke=\"";
            svg += color;
            svg += "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < dates.size(); ++i) {
                std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", x_at(i), y_at(series[s][i]));
                svg += buf;
            }
            svg += "\"/>\n";
        }
        std::snprintf(buf, sizeof(buf),
                      "<rect x=\"%.1f\" y=\"%.1f\" width=\"12\" height=\"12\" fill=\"%s\"/>"
                      "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"12\">%s"
                      "</text>\n",
                      kLeft + 10.0 + 140.0 * static_cast<double>(s), kTop + 6.0, color,
                      kLeft + 26.0 + 140.0 * static_cast<double>(s), kTop + 16.0,
                      labels[s].c_str());
        svg += buf;
    }
    svg += "</svg>\n";
    write_file_atomic(svg_path, svg);

    std::string csv = "date";
    for (const auto& label : labels) csv += "," + label;
    csv += "\n";
    for (std::size_t i = 0; i < dates.size(); ++i) {
        csv += dates[i].to_string();
        for (const auto& s : series) csv += "," + format_double(s[i]);
        csv += "\n";
    }
    std::filesystem::path csv_path = svg_path;
    csv_path.replace_extension(".csv");
    write_file_atomic(csv_path, csv);
}

} // namespace carbcast
