#pragma once

// Dependency-free static SVG line plots: axes with 1-2-5 ticks, grid,
// polyline series and a legend. One figure may hold a grid of panels.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace funnelsim {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    double strokeWidth = 1.3;
    bool dashed = false;
};

struct Axes {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    std::vector<Series> series;
};

namespace svgdetail {

inline std::string fmt(double v, const char* spec = "%.2f") {
    char buf[48];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

inline double nice_step(double span) {
    if (!(span > 0.0)) return 1.0;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    if (r < 1.5) return mag;
    if (r < 3.5) return 2.0 * mag;
    if (r < 7.5) return 5.0 * mag;
    return 10.0 * mag;
}

struct Range {
    double lo = 0.0, hi = 1.0;
    void expand(double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
};

inline void render_axes(std::string& out, const Axes& ax, double px, double py,
                        double pw, double ph) {
    const double mL = 62, mR = 14, mT = 30, mB = 42;
    const double x0 = px + mL, y0 = py + mT;
    const double w = pw - mL - mR, h = ph - mT - mB;

    bool first = true;
    double xlo = 0, xhi = 1, ylo = 0, yhi = 1;
    for (const Series& s : ax.series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (first) {
                xlo = xhi = s.x[i];
                ylo = yhi = s.y[i];
                first = false;
            } else {
                xlo = std::min(xlo, s.x[i]);
                xhi = std::max(xhi, s.x[i]);
                ylo = std::min(ylo, s.y[i]);
                yhi = std::max(yhi, s.y[i]);
            }
        }
    }
    if (xhi - xlo < 1e-12) xhi = xlo + 1.0;
    if (yhi - ylo < 1e-12) {
        yhi += 0.5;
        ylo -= 0.5;
    } else {
        const double pad = 0.05 * (yhi - ylo);
        yhi += pad;
        ylo -= pad;
    }
    auto X = [&](double v) { return x0 + (v - xlo) / (xhi - xlo) * w; };
    auto Y = [&](double v) { return y0 + h - (v - ylo) / (yhi - ylo) * h; };

    out += "<rect x=\"" + fmt(x0) + "\" y=\"" + fmt(y0) + "\" width=\"" + fmt(w) +
           "\" height=\"" + fmt(h) + "\" fill=\"white\" stroke=\"#444\" stroke-width=\"1\"/>\n";

    const double xstep = nice_step(xhi - xlo);
    for (double v = std::ceil(xlo / xstep) * xstep; v <= xhi + 1e-9 * xstep; v += xstep) {
        const double gx = X(v);
        out += "<line x1=\"" + fmt(gx) + "\" y1=\"" + fmt(y0) + "\" x2=\"" + fmt(gx) +
               "\" y2=\"" + fmt(y0 + h) + "\" stroke=\"#ddd\" stroke-width=\"0.6\"/>\n";
        out += "<text x=\"" + fmt(gx) + "\" y=\"" + fmt(y0 + h + 16) +
               "\" font-size=\"11\" text-anchor=\"middle\" fill=\"#333\">" +
               fmt(v, "%g") + "</text>\n";
    }
    const double ystep = nice_step(yhi - ylo);
    for (double v = std::ceil(ylo / ystep) * ystep; v <= yhi + 1e-9 * ystep; v += ystep) {
        const double gy = Y(v);
        out += "<line x1=\"" + fmt(x0) + "\" y1=\"" + fmt(gy) + "\" x2=\"" + fmt(x0 + w) +
               "\" y2=\"" + fmt(gy) + "\" stroke=\"#ddd\" stroke-width=\"0.6\"/>\n";
        out += "<text x=\"" + fmt(x0 - 6) + "\" y=\"" + fmt(gy + 4) +
               "\" font-size=\"11\" text-anchor=\"end\" fill=\"#333\">" + fmt(v, "%g") +
               "</text>\n";
    }

    for (const Series& s : ax.series) {
        if (s.x.empty()) continue;
        out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"" +
               fmt(s.strokeWidth) + "\"";
        if (s.dashed) out += " stroke-dasharray=\"6 4\"";
        out += " points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            out += fmt(X(s.x[i])) + "," + fmt(Y(s.y[i])) + " ";
        }
        out += "\"/>\n";
    }

    out += "<text x=\"" + fmt(x0 + w / 2) + "\" y=\"" + fmt(py + 18) +
           "\" font-size=\"14\" text-anchor=\"middle\" fill=\"#111\">" + ax.title +
           "</text>\n";
    out += "<text x=\"" + fmt(x0 + w / 2) + "\" y=\"" + fmt(y0 + h + 34) +
           "\" font-size=\"12\" text-anchor=\"middle\" fill=\"#111\">" + ax.xlabel +
           "</text>\n";
    out += "<text x=\"" + fmt(px + 16) + "\" y=\"" + fmt(y0 + h / 2) +
           "\" font-size=\"12\" text-anchor=\"middle\" fill=\"#111\" transform=\"rotate(-90 " +
           fmt(px + 16) + " " + fmt(y0 + h / 2) + ")\">" + ax.ylabel + "</text>\n";

    // Legend (top-right inside the axes).
    double ly = y0 + 14;
    for (const Series& s : ax.series) {
        if (s.label.empty()) continue;
        const double lx = x0 + w - 150;
        out += "<line x1=\"" + fmt(lx) + "\" y1=\"" + fmt(ly - 4) + "\" x2=\"" +
               fmt(lx + 26) + "\" y2=\"" + fmt(ly - 4) + "\" stroke=\"" + s.color +
               "\" stroke-width=\"2\"" + (s.dashed ? " stroke-dasharray=\"6 4\"" : "") +
               "/>\n";
        out += "<text x=\"" + fmt(lx + 32) + "\" y=\"" + fmt(ly) +
               "\" font-size=\"11\" fill=\"#333\">" + s.label + "</text>\n";
        ly += 15;
    }
}

}  // namespace svgdetail

inline std::string render_svg(const std::vector<Axes>& panels, int cols,
                              int width = 960, int height = 540) {
    const int n = static_cast<int>(panels.size());
    const int rows = (n + cols - 1) / cols;
    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " +
           std::to_string(width) + " " + std::to_string(height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    const double pw = static_cast<double>(width) / cols;
    const double ph = static_cast<double>(height) / rows;
    for (int i = 0; i < n; ++i) {
        const int r = i / cols, c = i % cols;
        svgdetail::render_axes(out, panels[i], c * pw, r * ph, pw, ph);
    }
    out += "</svg>\n";
    return out;
}

inline std::string render_svg(const Axes& axes, int width = 960, int height = 540) {
    return render_svg(std::vector<Axes>{axes}, 1, width, height);
}

}  // namespace funnelsim
