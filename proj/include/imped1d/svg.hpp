#pragma once

// Minimal self-contained SVG line plots: axes, ticks, polylines, legend.
// Emits plain text; no display or plotting library involved.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace imped1d {

class SvgPlot {
public:
    SvgPlot(std::string title, std::string x_label, std::string y_label)
        : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

    void add_series(std::string label, std::span<const double> x, std::span<const double> y,
                    std::string color, double stroke_width = 1.5, bool dashed = false) {
        if (x.size() != y.size()) throw std::invalid_argument("SvgPlot: x/y size mismatch");
        Series s;
        s.label = std::move(label);
        s.color = std::move(color);
        s.width = stroke_width;
        s.dashed = dashed;
        s.x.assign(x.begin(), x.end());
        s.y.assign(y.begin(), y.end());
        series_.push_back(std::move(s));
    }

    void write(const std::filesystem::path& path) const {
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
        out << render();
    }

    std::string render() const {
        double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
        double y_lo = x_lo, y_hi = -x_lo;
        for (const auto& s : series_)
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                x_lo = std::min(x_lo, s.x[i]);
                x_hi = std::max(x_hi, s.x[i]);
                y_lo = std::min(y_lo, s.y[i]);
                y_hi = std::max(y_hi, s.y[i]);
            }
        if (!(x_lo < x_hi)) {
            x_lo = 0.0;
            x_hi = 1.0;
        }
        if (!(y_lo < y_hi)) {
            y_lo -= 0.5;
            y_hi += 0.5;
        }
        const double y_pad = 0.06 * (y_hi - y_lo);
        y_lo -= y_pad;
        y_hi += y_pad;

        const double W = 880, H = 540, ml = 76, mr = 24, mt = 44, mb = 56;
        auto px = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * (W - ml - mr); };
        auto py = [&](double y) { return H - mb - (y - y_lo) / (y_hi - y_lo) * (H - mt - mb); };

        std::string svg;
        svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"880\" height=\"540\" "
               "viewBox=\"0 0 880 540\">\n";
        svg += "<rect width=\"880\" height=\"540\" fill=\"white\"/>\n";
        svg += "<text x=\"440\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" "
               "text-anchor=\"middle\">" + escape(title_) + "</text>\n";

        // ticks + grid
        for (int k = 0; k <= 5; ++k) {
            const double xv = x_lo + (x_hi - x_lo) * k / 5.0;
            const double yv = y_lo + (y_hi - y_lo) * k / 5.0;
            svg += line(px(xv), py(y_lo), px(xv), py(y_hi), "#e5e5e5", 0.8);
            svg += line(px(x_lo), py(yv), px(x_hi), py(yv), "#e5e5e5", 0.8);
            svg += text(px(xv), H - mb + 18.0, fmt_tick(xv), "middle");
            svg += text(ml - 8.0, py(yv) + 4.0, fmt_tick(yv), "end");
        }
        svg += line(px(x_lo), py(y_lo), px(x_hi), py(y_lo), "#333333", 1.2);
        svg += line(px(x_lo), py(y_lo), px(x_lo), py(y_hi), "#333333", 1.2);
        svg += text(0.5 * (ml + W - mr), H - 14.0, escape(x_label_), "middle");
        svg += "<text x=\"18\" y=\"" + fmt(0.5 * (mt + H - mb)) +
               "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
               "transform=\"rotate(-90 18 " + fmt(0.5 * (mt + H - mb)) + ")\">" + escape(y_label_) + "</text>\n";

        for (const auto& s : series_) {
            std::string points;
            bool open = false;
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
                    if (open) {
                        svg += polyline(points, s);
                        points.clear();
                        open = false;
                    }
                    continue;
                }
                points += fmt(px(s.x[i])) + "," + fmt(py(s.y[i])) + " ";
                open = true;
            }
            if (open) svg += polyline(points, s);
        }

        // legend, top right
        double ly = mt + 10.0;
        for (const auto& s : series_) {
            const double lx = W - mr - 180.0;
            svg += line(lx, ly, lx + 26.0, ly, s.color, s.width, s.dashed);
            svg += text(lx + 32.0, ly + 4.0, escape(s.label), "start");
            ly += 20.0;
        }
        svg += "</svg>\n";
        return svg;
    }

private:
    struct Series {
        std::string label, color;
        double width = 1.5;
        bool dashed = false;
        std::vector<double> x, y;
    };

    static std::string fmt(double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", v);
        return buf;
    }

    static std::string fmt_tick(double v) {
        if (std::abs(v) < 1e-12) v = 0.0;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3g", v);
        return buf;
    }

    static std::string escape(const std::string& s) {
        std::string out;
        for (char c : s) {
            if (c == '<') out += "&lt;";
            else if (c == '>') out += "&gt;";
            else if (c == '&') out += "&amp;";
            else out += c;
        }
        return out;
    }

    static std::string line(double x1, double y1, double x2, double y2, const std::string& color,
                            double width, bool dashed = false) {
        return "<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x2) + "\" y2=\"" + fmt(y2) +
               "\" stroke=\"" + color + "\" stroke-width=\"" + fmt(width) +
               (dashed ? "\" stroke-dasharray=\"6 4" : "") + "\"/>\n";
    }

    static std::string text(double x, double y, const std::string& content, const std::string& anchor) {
        return "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) +
               "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"" + anchor + "\">" + content +
               "</text>\n";
    }

    static std::string polyline(const std::string& points, const Series& s) {
        return "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"" + fmt(s.width) +
               (s.dashed ? "\" stroke-dasharray=\"6 4" : "") + "\" points=\"" + points + "\"/>\n";
    }

    std::string title_, x_label_, y_label_;
    std::vector<Series> series_;
};

}  // namespace imped1d
