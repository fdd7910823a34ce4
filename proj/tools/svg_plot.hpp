#pragma once

// Minimal self-contained SVG line plots.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace accum::cli {

enum class LineStyle { solid, dashed, dotted, dot_dashed };

inline const char* dash_array(LineStyle s) {
    switch (s) {
        case LineStyle::dashed: return "8,4";
        case LineStyle::dotted: return "2,3";
        case LineStyle::dot_dashed: return "8,3,2,3";
        default: return "";
    }
}

/// Figure legends cycle j = 1, 2, 3, 4 through these.
inline LineStyle style_for(std::size_t k) {
    static constexpr LineStyle order[] = {LineStyle::solid, LineStyle::dashed, LineStyle::dotted,
                                          LineStyle::dot_dashed};
    return order[k % 4];
}

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    LineStyle style = LineStyle::solid;
};

struct PlotSpec {
    std::string title;
    std::string x_label = "t";
    std::string y_label;
    std::vector<Series> series;
};

namespace detail {
inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string tick(double v) {
    std::ostringstream o;
    o.precision(4);
    o << v;
    return o.str();
}
}  // namespace detail

inline std::string render_svg(const PlotSpec& spec) {
    constexpr double W = 640, H = 420, L = 70, R = 160, T = 40, B = 50;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : spec.series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 <= x0) x1 = x0 + 1;
    if (y1 <= y0) y1 = y0 + 1;
    y0 = std::min(y0, 0.0);
    const auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    const auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << detail::escape(spec.title)
      << "</text>\n";
    o << "<g stroke=\"black\" fill=\"none\"><rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R
      << "\" height=\"" << H - T - B << "\"/></g>\n";
    for (int k = 0; k <= 5; ++k) {
        const double xv = x0 + (x1 - x0) * k / 5.0, yv = y0 + (y1 - y0) * k / 5.0;
        o << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << detail::tick(xv)
          << "</text>\n";
        o << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << detail::tick(yv)
          << "</text>\n";
    }
    o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">"
      << detail::escape(spec.x_label) << "</text>\n";
    o << "<text transform=\"translate(16," << (T + H - B) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << detail::escape(spec.y_label) << "</text>\n";

    for (std::size_t k = 0; k < spec.series.size(); ++k) {
        const auto& s = spec.series[k];
        o << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"";
        if (*dash_array(s.style)) o << " stroke-dasharray=\"" << dash_array(s.style) << '"';
        o << " points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) o << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        o << "\"/>\n";
        const double ly = T + 16 + 18.0 * static_cast<double>(k);
        o << "<line x1=\"" << W - R + 12 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 42 << "\" y2=\"" << ly
          << "\" stroke=\"black\" stroke-width=\"1.5\"";
        if (*dash_array(s.style)) o << " stroke-dasharray=\"" << dash_array(s.style) << '"';
        o << "/>\n<text x=\"" << W - R + 48 << "\" y=\"" << ly + 4 << "\">" << detail::escape(s.label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

inline void write_svg(const std::string& path, const PlotSpec& spec) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << render_svg(spec);
}

}  // namespace accum::cli
