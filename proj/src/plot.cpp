#include "mdd/plot.hpp"
#include "mdd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace mdd {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 60.0;

struct Axis {
    double lo = 0.0, hi = 1.0;
    double to_px(double v, double px_lo, double px_hi) const {
        double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
        return px_lo + t * (px_hi - px_lo);
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out)
            throw DataError("cannot open file for writing: " + tmp);
        out << content;
        if (!out)
            throw DataError("write failure: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw DataError("cannot rename " + tmp + ": " + ec.message());
}

void svg_header(std::ostringstream& svg, const std::string& title) {
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight
        << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n"
        << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\""
        << kWidth - 2 * kMargin << "\" height=\"" << kHeight - 2 * kMargin
        << "\" fill=\"none\" stroke=\"black\"/>\n";
}

} // namespace

void emit_plots(const DenoiseReport& report, const std::vector<FluctuationCurve>& curves,
                const std::string& dir) {
    std::filesystem::create_directories(dir);

    const std::vector<double>& alphas = report.mode_scores.alphas;
    if (alphas.empty())
        throw DataError("emit_plots: report has no mode exponents");
    {
        Axis x{0.5, static_cast<double>(alphas.size()) + 0.5};
        double lo = *std::min_element(alphas.begin(), alphas.end());
        double hi = *std::max_element(alphas.begin(), alphas.end());
        double pad = std::max(0.05, 0.1 * (hi - lo));
        Axis y{lo - pad, hi + pad};
        const double px_l = kMargin, px_r = kWidth - kMargin;
        const double py_b = kHeight - kMargin, py_t = kMargin;

        std::ostringstream svg;
        svg_header(svg, "scaling exponent per mode");
        // cut marker between k1 and k1+1
        if (alphas.size() > 1) {
            double cx = x.to_px(report.mode_scores.k1 + 0.5, px_l, px_r);
            svg << "<line x1=\"" << cx << "\" y1=\"" << py_t << "\" x2=\"" << cx
                << "\" y2=\"" << py_b
                << "\" stroke=\"red\" stroke-dasharray=\"6 4\"/>\n"
                << "<text x=\"" << cx + 4 << "\" y=\"" << py_t + 16
                << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"red\">K1 = "
                << report.mode_scores.k1 << "</text>\n";
        }
        svg << "<polyline fill=\"none\" stroke=\"steelblue\" points=\"";
        for (std::size_t j = 0; j < alphas.size(); ++j)
            svg << x.to_px(static_cast<double>(j + 1), px_l, px_r) << ","
                << y.to_px(alphas[j], py_b, py_t) << " ";
        svg << "\"/>\n";
        for (std::size_t j = 0; j < alphas.size(); ++j) {
            double cx = x.to_px(static_cast<double>(j + 1), px_l, px_r);
            double cy = y.to_px(alphas[j], py_b, py_t);
            svg << "<circle cx=\"" << cx << "\" cy=\"" << cy
                << "\" r=\"4\" fill=\"steelblue\"/>\n"
                << "<text x=\"" << cx << "\" y=\"" << py_b + 18
                << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                << "font-size=\"11\">" << j + 1 << "</text>\n";
        }
        svg << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 16
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
            << "font-size=\"13\">mode index k</text>\n"
            << "<text x=\"18\" y=\"" << kHeight / 2
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
            << "transform=\"rotate(-90 18 " << kHeight / 2 << ")\">alpha</text>\n"
            << "</svg>\n";
        write_atomic(dir + "/alpha_vs_k.svg", svg.str());
    }

    if (curves.empty())
        return;

    {
        double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
        for (const FluctuationCurve& c : curves)
            for (std::size_t i = 0; i < c.scales.size(); ++i)
                if (c.f_values[i] > 0.0) {
                    double lx = std::log(static_cast<double>(c.scales[i]));
                    double ly = std::log(c.f_values[i]);
                    xlo = std::min(xlo, lx); xhi = std::max(xhi, lx);
                    ylo = std::min(ylo, ly); yhi = std::max(yhi, ly);
                }
        if (xhi < xlo)  // every curve all-zero: nothing to draw
            return;
        Axis x{xlo - 0.1, xhi + 0.1};
        double pad = std::max(0.1, 0.05 * (yhi - ylo));
        Axis y{ylo - pad, yhi + pad};
        const double px_l = kMargin, px_r = kWidth - kMargin;
        const double py_b = kHeight - kMargin, py_t = kMargin;

        std::ostringstream svg;
        svg_header(svg, "log-log fluctuation curves");
        int hue = 0;
        for (const FluctuationCurve& c : curves) {
            std::string color = "hsl(" + std::to_string(hue) + ",60%,40%)";
            hue = (hue + 47) % 360;
            double first_lx = 0.0, first_ly = 0.0;
            bool have_first = false;
            // fitted line from the curve's own alpha and the log-mean intercept
            double sx = 0.0, sy = 0.0;
            int used = 0;
            for (std::size_t i = 0; i < c.scales.size(); ++i)
                if (c.f_values[i] > 0.0) {
                    double lx = std::log(static_cast<double>(c.scales[i]));
                    double ly = std::log(c.f_values[i]);
                    if (!have_first) { first_lx = lx; first_ly = ly; have_first = true; }
                    sx += lx; sy += ly; ++used;
                    svg << "<circle cx=\"" << x.to_px(lx, px_l, px_r) << "\" cy=\""
                        << y.to_px(ly, py_b, py_t) << "\" r=\"3\" fill=\"" << color
                        << "\"/>\n";
                }
            if (used >= 2) {
                double mx = sx / used, my = sy / used;
                double b = my - c.alpha * mx;
                svg << "<line x1=\"" << x.to_px(x.lo, px_l, px_r) << "\" y1=\""
                    << y.to_px(c.alpha * x.lo + b, py_b, py_t) << "\" x2=\""
                    << x.to_px(x.hi, px_l, px_r) << "\" y2=\""
                    << y.to_px(c.alpha * x.hi + b, py_b, py_t) << "\" stroke=\"" << color
                    << "\" stroke-width=\"1\"/>\n";
            }
            if (have_first)
                svg << "<text x=\"" << x.to_px(first_lx, px_l, px_r) - 6 << "\" y=\""
                    << y.to_px(first_ly, py_b, py_t) - 6
                    << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << color
                    << "\">slope " << fmt(c.alpha) << "</text>\n";
        }
        svg << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 16
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
            << "font-size=\"13\">ln s</text>\n"
            << "<text x=\"18\" y=\"" << kHeight / 2
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
            << "transform=\"rotate(-90 18 " << kHeight / 2 << ")\">ln F</text>\n"
            << "</svg>\n";
        write_atomic(dir + "/loglog_fluctuation.svg", svg.str());
    }
}

} // namespace mdd
