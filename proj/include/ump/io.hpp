#pragma once

// Artifact writers: canonical CSV (header row, '.' decimal, 17 significant
// digits) and convenience SVG plots emitted as bare polylines.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ump/errors.hpp"

namespace ump {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ConfigInvalid("cannot open for writing: " + path);
    for (std::size_t c = 0; c < header.size(); ++c)
        out << (c ? "," : "") << header[c];
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out << (c ? "," : "") << format_double(row[c]);
        out << '\n';
    }
}

struct SvgSeries {
    std::vector<double> xs, ys;
    std::string color = "#1f6fb2";
};

inline void write_svg(const std::string& path, const std::vector<SvgSeries>& series,
                      const std::string& title = "") {
    const double W = 800.0, H = 500.0, pad = 50.0;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series) {
        for (double x : s.xs) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
        }
        for (double y : s.ys) {
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > ymin)) ymax = ymin + 1.0;

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ConfigInvalid("cannot open for writing: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty())
        out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";
    out << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << W - 2 * pad
        << "\" height=\"" << H - 2 * pad << "\" fill=\"none\" stroke=\"#888\"/>\n";
    for (const auto& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < s.xs.size(); ++i) {
            const double px = pad + (s.xs[i] - xmin) / (xmax - xmin) * (W - 2 * pad);
            const double py = H - pad - (s.ys[i] - ymin) / (ymax - ymin) * (H - 2 * pad);
            out << px << ',' << py << ' ';
        }
        out << "\"/>\n";
    }
    out << "</svg>\n";
}

} // namespace ump
