#include "regpot/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "regpot/error.hpp"

namespace regpot {
namespace {

constexpr std::array<const char*, 8> kPalette = {"#000000", "#d62728", "#1f77b4", "#2ca02c",
                                                 "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string escape(const std::string& s) {
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

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::string tick_label(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    bool log = false;

    double map(double v) const {
        const double a = log ? std::log10(v) : v;
        return (a - lo) / (hi - lo);
    }
};

Axis make_axis(const std::vector<PlotSeries>& series, bool use_x, bool log) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& s : series) {
        for (double v : use_x ? s.x : s.y) {
            if (!std::isfinite(v) || (log && !(v > 0.0))) continue;
            const double a = log ? std::log10(v) : v;
            lo = std::min(lo, a);
            hi = std::max(hi, a);
        }
    }
    if (!std::isfinite(lo)) {
        lo = 0.0;
        hi = 1.0;
    }
    if (hi - lo <= 0.0) {
        const double pad = std::max(1.0, std::fabs(lo)) * 0.5;
        lo -= pad;
        hi += pad;
    } else if (!log) {
        const double pad = 0.04 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
    return {lo, hi, log};
}

std::vector<double> nice_ticks(const Axis& axis) {
    std::vector<double> ticks;
    if (axis.log) {
        for (double e = std::ceil(axis.lo); e <= std::floor(axis.hi); e += 1.0) ticks.push_back(std::pow(10.0, e));
        return ticks;
    }
    const double span = axis.hi - axis.lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    for (double v = std::ceil(axis.lo / step) * step; v <= axis.hi + 1e-9 * span; v += step)
        ticks.push_back(std::fabs(v) < 1e-12 * span ? 0.0 : v);
    return ticks;
}

}  // namespace

std::string render_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series) {
    for (const auto& s : series)
        if (s.x.size() != s.y.size()) throw ValidationError("svg", "series '" + s.label + "' has mismatched x/y");

    const double w = spec.width;
    const double h = spec.height;
    const double left = 70, right = 20, top = 40, bottom = 55;
    const double pw = w - left - right;
    const double ph = h - top - bottom;
    const Axis ax = make_axis(series, true, spec.log_x);
    const Axis ay = make_axis(series, false, spec.log_y);
    auto px = [&](double v) { return left + ax.map(v) * pw; };
    auto py = [&](double v) { return top + (1.0 - ay.map(v)) * ph; };

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(spec.width) +
           "\" height=\"" + std::to_string(spec.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(w / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + escape(spec.title) +
           "</text>\n";
    out += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
           "\" fill=\"none\" stroke=\"#444\"/>\n";

    for (double t : nice_ticks(ax)) {
        const double x = px(t);
        out += "<line x1=\"" + num(x) + "\" y1=\"" + num(top + ph) + "\" x2=\"" + num(x) + "\" y2=\"" +
               num(top + ph + 5) + "\" stroke=\"#444\"/>\n";
        out += "<text x=\"" + num(x) + "\" y=\"" + num(top + ph + 18) + "\" text-anchor=\"middle\">" +
               tick_label(t) + "</text>\n";
    }
    for (double t : nice_ticks(ay)) {
        const double y = py(t);
        out += "<line x1=\"" + num(left - 5) + "\" y1=\"" + num(y) + "\" x2=\"" + num(left) + "\" y2=\"" + num(y) +
               "\" stroke=\"#444\"/>\n";
        out += "<text x=\"" + num(left - 8) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">" + tick_label(t) +
               "</text>\n";
    }
    out += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(h - 12) + "\" text-anchor=\"middle\">" +
           escape(spec.xlabel) + "</text>\n";
    out += "<text x=\"16\" y=\"" + num(top + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           num(top + ph / 2) + ")\">" + escape(spec.ylabel) + "</text>\n";

    out += "<g clip-path=\"url(#plot)\">\n";
    out += "<clipPath id=\"plot\"><rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) +
           "\" height=\"" + num(ph) + "\"/></clipPath>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % kPalette.size()];
        const auto& ser = series[s];
        if (ser.markers) {
            for (std::size_t i = 0; i < ser.x.size(); ++i) {
                if (!std::isfinite(ser.y[i]) || (spec.log_y && !(ser.y[i] > 0.0))) continue;
                out += "<circle cx=\"" + num(px(ser.x[i])) + "\" cy=\"" + num(py(ser.y[i])) + "\" r=\"3\" fill=\"" +
                       color + "\"/>\n";
            }
            continue;
        }
        std::string points;
        for (std::size_t i = 0; i < ser.x.size(); ++i) {
            if (!std::isfinite(ser.y[i]) || (spec.log_y && !(ser.y[i] > 0.0))) continue;
            if (!points.empty()) points += ' ';
            points += num(px(ser.x[i])) + "," + num(py(ser.y[i]));
        }
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.3\" points=\"" +
               points + "\"/>\n";
    }
    out += "</g>\n";

    double ly = top + 14;
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % kPalette.size()];
        const double lx = left + pw - 150;
        out += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(lx + 22) + "\" y2=\"" +
               num(ly - 4) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + num(lx + 28) + "\" y=\"" + num(ly) + "\">" + escape(series[s].label) + "</text>\n";
        ly += 16;
    }
    out += "</svg>\n";
    return out;
}

std::vector<double> normalize_unit(const std::vector<double>& y) {
    if (y.empty()) return {};
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    const double span = *hi - *lo;
    std::vector<double> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = span > 0.0 ? (y[i] - *lo) / span : 0.0;
    return out;
}

}  // namespace regpot
