#include "reglab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "reglab/common.hpp"

namespace reglab {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 480;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 50;

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void expand(double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    void pad() {
        if (!(lo < hi)) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double margin = 0.05 * (hi - lo);
        lo -= margin;
        hi += margin;
    }
};

} // namespace

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<PlotSeries>& series) {
    std::ofstream out(path);
    if (!out) {
        throw InvalidInput("cannot open for writing: " + path);
    }
    Range rx, ry;
    for (const auto& s : series) {
        for (double v : s.x) {
            rx.expand(v);
        }
        for (double v : s.y) {
            ry.expand(v);
        }
    }
    rx.pad();
    ry.pad();

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    auto px = [&](double v) {
        return kMarginLeft + plot_w * (v - rx.lo) / (rx.hi - rx.lo);
    };
    auto py = [&](double v) {
        return kMarginTop + plot_h * (1.0 - (v - ry.lo) / (ry.hi - ry.lo));
    };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";

    // axes
    out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop + plot_h
        << "\" x2=\"" << kMarginLeft + plot_w << "\" y2=\"" << kMarginTop + plot_h
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\""
        << kMarginLeft << "\" y2=\"" << kMarginTop + plot_h
        << "\" stroke=\"black\"/>\n";

    const int n_ticks = 5;
    for (int i = 0; i <= n_ticks; ++i) {
        const double tx = rx.lo + (rx.hi - rx.lo) * i / n_ticks;
        const double ty = ry.lo + (ry.hi - ry.lo) * i / n_ticks;
        out << "<text x=\"" << px(tx) << "\" y=\"" << kMarginTop + plot_h + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
            << "font-size=\"11\">" << tx << "</text>\n";
        out << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << py(ty) + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
            << "font-size=\"11\">" << ty << "</text>\n";
    }
    out << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
        << xlabel << "</text>\n";
    out << "<text x=\"16\" y=\"" << kMarginTop + plot_h / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 16 " << kMarginTop + plot_h / 2 << ")\">" << ylabel
        << "</text>\n";

    int legend_y = kMarginTop + 6;
    for (const auto& s : series) {
        if (s.markers_only) {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                out << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i])
                    << "\" r=\"5\" fill=\"none\" stroke=\"" << s.color
                    << "\" stroke-width=\"2\"/>\n";
            }
        } else {
            out << "<polyline fill=\"none\" stroke=\"" << s.color
                << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
                    out << px(s.x[i]) << "," << py(s.y[i]) << " ";
                }
            }
            out << "\"/>\n";
        }
        if (!s.label.empty()) {
            out << "<rect x=\"" << kMarginLeft + plot_w - 150 << "\" y=\""
                << legend_y - 8 << "\" width=\"12\" height=\"3\" fill=\"" << s.color
                << "\"/>\n";
            out << "<text x=\"" << kMarginLeft + plot_w - 132 << "\" y=\"" << legend_y
                << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label
                << "</text>\n";
            legend_y += 18;
        }
    }
    out << "</svg>\n";
}

} // namespace reglab
