#include "wpcurve/svg.hpp"

#include "wpcurve/csv.hpp"
#include "wpcurve/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace wpc {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 30.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 55.0;

struct Range {
    double lo = 0.0;
    double hi = 1.0;

    static Range of(std::span<const double> values) {
        Range r{values.empty() ? 0.0 : values[0], values.empty() ? 1.0 : values[0]};
        for (double v : values) {
            r.lo = std::min(r.lo, v);
            r.hi = std::max(r.hi, v);
        }
        if (r.hi - r.lo < 1e-12) r.hi = r.lo + 1.0;
        return r;
    }

    double span() const { return hi - lo; }
};

struct Frame {
    Range x, y;

    double px(double v) const {
        return kMarginLeft + (v - x.lo) / x.span() * (kWidth - kMarginLeft - kMarginRight);
    }
    double py(double v) const {
        return kHeight - kMarginBottom -
               (v - y.lo) / y.span() * (kHeight - kMarginTop - kMarginBottom);
    }
};

std::string num(double v) { return formatDouble(std::round(v * 100.0) / 100.0); }

std::string escapeXml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

void openSvg(std::ostringstream& out, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" font-family=\"sans-serif\" font-size=\"15\""
        << " text-anchor=\"middle\">" << escapeXml(title) << "</text>\n";
}

void drawAxes(std::ostringstream& out, const Frame& f, const std::string& xLabel,
              const std::string& yLabel) {
    const double x0 = kMarginLeft, x1 = kWidth - kMarginRight;
    const double y0 = kHeight - kMarginBottom, y1 = kMarginTop;
    out << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1
        << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double tx = f.x.lo + f.x.span() * i / 5.0;
        const double ty = f.y.lo + f.y.span() * i / 5.0;
        out << "<text x=\"" << f.px(tx) << "\" y=\"" << y0 + 18
            << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">" << num(tx)
            << "</text>\n";
        out << "<text x=\"" << x0 - 8 << "\" y=\"" << f.py(ty) + 3
            << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">" << num(ty)
            << "</text>\n";
        out << "<line x1=\"" << f.px(tx) << "\" y1=\"" << y0 << "\" x2=\"" << f.px(tx)
            << "\" y2=\"" << y0 + 4 << "\" stroke=\"black\"/>\n";
        out << "<line x1=\"" << x0 - 4 << "\" y1=\"" << f.py(ty) << "\" x2=\"" << x0 << "\" y2=\""
            << f.py(ty) << "\" stroke=\"black\"/>\n";
    }
    out << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 12
        << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">"
        << escapeXml(xLabel) << "</text>\n";
    out << "<text x=\"16\" y=\"" << (y0 + y1) / 2
        << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\""
        << " transform=\"rotate(-90 16 " << (y0 + y1) / 2 << ")\">" << escapeXml(yLabel)
        << "</text>\n";
}

std::string heatColor(double t) {
    // light steel blue -> dark red
    t = std::clamp(t, 0.0, 1.0);
    const int r = static_cast<int>(176 + t * (139 - 176));
    const int g = static_cast<int>(196 + t * (0 - 196));
    const int b = static_cast<int>(222 + t * (0 - 222));
    std::ostringstream c;
    c << "rgb(" << r << "," << g << "," << b << ")";
    return c.str();
}

void saveSvg(const std::string& path, std::ostringstream& out) {
    out << "</svg>\n";
    std::ofstream file(path);
    if (!file) throw DataError("cannot write SVG: " + path);
    file << out.str();
}

} // namespace

void writeScatterSvg(const std::string& path, const std::string& title,
                     const std::string& xLabel, const std::string& yLabel,
                     std::span<const double> x, std::span<const double> y,
                     std::span<const double> color, const std::string& colorLabel) {
    if (x.size() != y.size() || (color.size() != 0 && color.size() != x.size())) {
        throw DataError("scatter SVG: input length mismatch");
    }
    Frame f{Range::of(x), Range::of(y)};
    const Range cr = color.empty() ? Range{0, 1} : Range::of(color);

    std::ostringstream out;
    openSvg(out, title);
    drawAxes(out, f, xLabel, yLabel);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double t = color.empty() ? 0.5 : (color[i] - cr.lo) / cr.span();
        out << "<circle cx=\"" << num(f.px(x[i])) << "\" cy=\"" << num(f.py(y[i]))
            << "\" r=\"2\" fill=\"" << heatColor(t) << "\" fill-opacity=\"0.7\"/>\n";
    }
    if (!color.empty()) {
        out << "<text x=\"" << kWidth - kMarginRight << "\" y=\"" << kMarginTop - 8
            << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">"
            << escapeXml(colorLabel) << ": " << num(cr.lo) << " (light) to " << num(cr.hi)
            << " (dark)</text>\n";
    }
    saveSvg(path, out);
}

void writeBinReportSvg(const std::string& path, const BinReport& report) {
    std::vector<double> centers, freqs, stds;
    for (const auto& b : report.bins) {
        centers.push_back(b.center);
        freqs.push_back(b.frequency);
        stds.push_back(b.meanEpistemicStdKw);
    }
    Frame f{Range::of(centers), Range::of(freqs)};
    f.y.lo = 0.0;
    const Range sr = Range::of(stds);

    std::ostringstream out;
    openSvg(out, "Epistemic std vs sample frequency per wind-speed bin");
    drawAxes(out, f, "wind speed bin center", "relative frequency");

    const double barW =
        report.bins.size() > 1
            ? std::max(2.0, (kWidth - kMarginLeft - kMarginRight) /
                                static_cast<double>(report.bins.size()) * 0.8)
            : 20.0;
    for (const auto& b : report.bins) {
        const double t = (b.meanEpistemicStdKw - sr.lo) / sr.span();
        out << "<rect x=\"" << num(f.px(b.center) - barW / 2) << "\" y=\"" << num(f.py(b.frequency))
            << "\" width=\"" << num(barW) << "\" height=\""
            << num(f.py(0.0) - f.py(b.frequency)) << "\" fill=\"" << heatColor(t) << "\"/>\n";
    }
    out << "<text x=\"" << kWidth - kMarginRight << "\" y=\"" << kMarginTop - 8
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">bar shade: mean "
           "epistemic std "
        << num(sr.lo) << " (light) to " << num(sr.hi) << " (dark) kW</text>\n";
    saveSvg(path, out);
}

void writePowerDistributionSvg(const std::string& path, const PowerDistribution& dist) {
    std::vector<double> edges = dist.binLowEdgesKw;
    edges.push_back(edges.back() + dist.binWidthKw);
    double maxDensity = 0.0;
    for (double v : dist.actualDensity) maxDensity = std::max(maxDensity, v);
    for (double v : dist.predictedDensity) maxDensity = std::max(maxDensity, v);

    Frame f{Range::of(edges), Range{0.0, maxDensity > 0 ? maxDensity * 1.05 : 1.0}};

    std::ostringstream out;
    openSvg(out, "Power distribution: actual vs predicted");
    drawAxes(out, f, "power [kW]", "relative frequency");

    for (std::size_t i = 0; i < dist.binLowEdgesKw.size(); ++i) {
        const double x0 = f.px(dist.binLowEdgesKw[i]);
        const double x1 = f.px(dist.binLowEdgesKw[i] + dist.binWidthKw);
        out << "<rect x=\"" << num(x0) << "\" y=\"" << num(f.py(dist.actualDensity[i]))
            << "\" width=\"" << num(x1 - x0) << "\" height=\""
            << num(f.py(0.0) - f.py(dist.actualDensity[i]))
            << "\" fill=\"steelblue\" fill-opacity=\"0.5\"/>\n";
        out << "<rect x=\"" << num(x0) << "\" y=\"" << num(f.py(dist.predictedDensity[i]))
            << "\" width=\"" << num(x1 - x0) << "\" height=\""
            << num(f.py(0.0) - f.py(dist.predictedDensity[i]))
            << "\" fill=\"darkred\" fill-opacity=\"0.4\"/>\n";
    }
    out << "<text x=\"" << kWidth - kMarginRight << "\" y=\"" << kMarginTop - 8
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">blue: actual, "
           "red: predicted, TV distance "
        << num(dist.totalVariation) << "</text>\n";
    saveSvg(path, out);
}

void writeAblationSvg(const std::string& path, const AblationReport& report) {
    if (report.rows.empty()) throw DataError("ablation SVG: empty report");
    std::vector<double> maes, highs;
    for (const auto& r : report.rows) {
        maes.push_back(r.maeMeanKw);
        highs.push_back(r.maeMeanKw + r.maeStdKw);
    }
    Frame f{Range{-0.5, static_cast<double>(report.rows.size()) - 0.5},
            Range{0.0, *std::max_element(highs.begin(), highs.end()) * 1.1}};

    std::ostringstream out;
    openSvg(out, "MAE per feature set");
    drawAxes(out, f, "", "MAE [kW]");

    const double barW = (kWidth - kMarginLeft - kMarginRight) /
                        static_cast<double>(report.rows.size()) * 0.6;
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const auto& row = report.rows[i];
        const double cx = f.px(static_cast<double>(i));
        out << "<rect x=\"" << num(cx - barW / 2) << "\" y=\"" << num(f.py(row.maeMeanKw))
            << "\" width=\"" << num(barW) << "\" height=\""
            << num(f.py(0.0) - f.py(row.maeMeanKw)) << "\" fill=\"steelblue\"/>\n";
        out << "<line x1=\"" << num(cx) << "\" y1=\"" << num(f.py(row.maeMeanKw - row.maeStdKw))
            << "\" x2=\"" << num(cx) << "\" y2=\"" << num(f.py(row.maeMeanKw + row.maeStdKw))
            << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << num(cx) << "\" y=\"" << kHeight - kMarginBottom + 16
            << "\" font-family=\"sans-serif\" font-size=\"9\" text-anchor=\"middle\">"
            << escapeXml(row.label) << "</text>\n";
    }
    saveSvg(path, out);
}

} // namespace wpc
