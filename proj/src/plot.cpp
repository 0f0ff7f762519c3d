#include <algorithm>
#include <cmath>
#include <sstream>

#include "prmrl/harness.hpp"

namespace prmrl {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

struct Scale {
    double lo, hi, px0, px1;
    double operator()(double v) const {
        if (hi == lo) return 0.5 * (px0 + px1);
        return px0 + (v - lo) / (hi - lo) * (px1 - px0);
    }
};

// Round tick spacing to a 1/2/5 ladder.
std::vector<double> ticks(double lo, double hi, int target = 5) {
    if (hi <= lo) return {lo};
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (raw <= m * mag) {
            step = m * mag;
            break;
        }
    std::vector<double> out;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-12 * step; v += step)
        out.push_back(v);
    return out;
}

}  // namespace

std::string render_curve_svg(const std::vector<AggregateRow>& rows, const std::string& title) {
    const int width = 720, height = 440;
    const double ml = 70, mr = 20, mt = 40, mb = 50;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
       << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"15\">" << title << "</text>\n";

    if (!rows.empty()) {
        double xlo = rows.front().step, xhi = rows.back().step;
        double ylo = rows[0].p25, yhi = rows[0].p75;
        for (const auto& r : rows) {
            ylo = std::min(ylo, r.p25);
            yhi = std::max(yhi, r.p75);
        }
        if (yhi == ylo) yhi = ylo + 1.0;
        const double pad = 0.05 * (yhi - ylo);
        ylo -= pad;
        yhi += pad;
        const Scale sx{xlo, xhi, ml, width - mr};
        const Scale sy{ylo, yhi, height - mb, mt};

        // Interquartile band.
        os << "<polygon fill=\"#9ecae1\" fill-opacity=\"0.5\" stroke=\"none\" points=\"";
        for (const auto& r : rows) os << fmt(sx(r.step)) << "," << fmt(sy(r.p25)) << " ";
        for (auto it = rows.rbegin(); it != rows.rend(); ++it)
            os << fmt(sx(it->step)) << "," << fmt(sy(it->p75)) << " ";
        os << "\"/>\n";
        // Median line.
        os << "<polyline fill=\"none\" stroke=\"#08519c\" stroke-width=\"2\" points=\"";
        for (const auto& r : rows) os << fmt(sx(r.step)) << "," << fmt(sy(r.median)) << " ";
        os << "\"/>\n";

        for (double t : ticks(xlo, xhi)) {
            os << "<line x1=\"" << fmt(sx(t)) << "\" y1=\"" << fmt(height - mb) << "\" x2=\""
               << fmt(sx(t)) << "\" y2=\"" << fmt(height - mb + 5) << "\" stroke=\"black\"/>\n";
            os << "<text x=\"" << fmt(sx(t)) << "\" y=\"" << fmt(height - mb + 20)
               << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(t)
               << "</text>\n";
        }
        for (double t : ticks(ylo, yhi)) {
            os << "<line x1=\"" << fmt(ml - 5) << "\" y1=\"" << fmt(sy(t)) << "\" x2=\"" << fmt(ml)
               << "\" y2=\"" << fmt(sy(t)) << "\" stroke=\"black\"/>\n";
            os << "<text x=\"" << fmt(ml - 8) << "\" y=\"" << fmt(sy(t) + 4)
               << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(t)
               << "</text>\n";
        }
    }

    os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
       << height - mb << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
       << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">training step"
          "</text>\n";
    os << "<text x=\"16\" y=\"" << (mt + height - mb) / 2
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
          "transform=\"rotate(-90 16 "
       << (mt + height - mb) / 2 << ")\">average reward per step</text>\n";
    os << "</svg>\n";
    return os.str();
}

std::string render_heatmap_svg(const HeatmapGrid& grid) {
    const int cell = 32;
    const int width = grid.width * cell, height = grid.height * cell;
    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < grid.values.size(); ++i) {
        if (!grid.present[i]) continue;
        if (!any) {
            lo = hi = grid.values[i];
            any = true;
        } else {
            lo = std::min(lo, grid.values[i]);
            hi = std::max(hi, grid.values[i]);
        }
    }
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
       << height << "\">\n";
    for (int r = 0; r < grid.height; ++r)
        for (int c = 0; c < grid.width; ++c) {
            const std::size_t i = static_cast<std::size_t>(r) * grid.width + c;
            std::string fill = "#404040";  // walls
            if (grid.present[i]) {
                const double t = hi > lo ? (grid.values[i] - lo) / (hi - lo) : 0.5;
                // Red (low) to blue (high).
                const int red = static_cast<int>(std::lround(255 * (1.0 - t)));
                const int blue = static_cast<int>(std::lround(255 * t));
                std::ostringstream color;
                color << "rgb(" << red << ",60," << blue << ")";
                fill = color.str();
            }
            os << "<rect x=\"" << c * cell << "\" y=\"" << r * cell << "\" width=\"" << cell
               << "\" height=\"" << cell << "\" fill=\"" << fill << "\"/>\n";
        }
    os << "</svg>\n";
    return os.str();
}

}  // namespace prmrl
