// SPDX-License-Identifier: Apache-2.0
#include "fairdiff/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "fairdiff/errors.hpp"

namespace fairdiff {

std::string format_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

// Fixed short formatting for SVG coordinates.
std::string fmt2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt_axis(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kMarginLeft = 60.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 45.0;

const char* kSeriesColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

struct AxisRange {
    double lo = 0.0;
    double hi = 1.0;
};

// Tight range over the data; constant data padded symmetrically.
AxisRange tight_range(double lo, double hi) {
    if (lo > hi) return {0.0, 1.0};
    if (lo == hi) {
        const double half = std::abs(lo) > 1e6 ? std::abs(lo) * 1e-3 : 1.0;
        return {lo - half, hi + half};
    }
    return {lo, hi};
}

struct Viewport {
    AxisRange xr, yr;
    double map_x(double x) const {
        return kMarginLeft + (x - xr.lo) / (xr.hi - xr.lo) * (kWidth - kMarginLeft - kMarginRight);
    }
    double map_y(double y) const {
        return kHeight - kMarginBottom -
               (y - yr.lo) / (yr.hi - yr.lo) * (kHeight - kMarginTop - kMarginBottom);
    }
};

void open_svg(std::ostringstream& svg, const std::string& title) {
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    svg << "  <rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" fill=\"white\"/>\n";
    if (!title.empty()) {
        svg << "  <text x=\"" << kWidth / 2
            << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
            << xml_escape(title) << "</text>\n";
    }
}

void draw_axes(std::ostringstream& svg, const Viewport& vp, const std::string& x_label,
               const std::string& y_label) {
    const double x0 = kMarginLeft, x1 = kWidth - kMarginRight;
    const double y0 = kHeight - kMarginBottom, y1 = kMarginTop;
    svg << "  <line x1=\"" << fmt2(x0) << "\" y1=\"" << fmt2(y0) << "\" x2=\"" << fmt2(x1)
        << "\" y2=\"" << fmt2(y0) << "\" stroke=\"black\"/>\n";
    svg << "  <line x1=\"" << fmt2(x0) << "\" y1=\"" << fmt2(y0) << "\" x2=\"" << fmt2(x0)
        << "\" y2=\"" << fmt2(y1) << "\" stroke=\"black\"/>\n";
    // Axis extremes, the contract the chart tests rely on.
    svg << "  <text x=\"" << fmt2(x0) << "\" y=\"" << fmt2(y0 + 16)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << fmt_axis(vp.xr.lo) << "</text>\n";
    svg << "  <text x=\"" << fmt2(x1) << "\" y=\"" << fmt2(y0 + 16)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt_axis(vp.xr.hi) << "</text>\n";
    svg << "  <text x=\"" << fmt2(x0 - 6) << "\" y=\"" << fmt2(y0)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt_axis(vp.yr.lo) << "</text>\n";
    svg << "  <text x=\"" << fmt2(x0 - 6) << "\" y=\"" << fmt2(y1 + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt_axis(vp.yr.hi) << "</text>\n";
    if (!x_label.empty()) {
        svg << "  <text x=\"" << fmt2((x0 + x1) / 2) << "\" y=\"" << fmt2(kHeight - 8)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
            << xml_escape(x_label) << "</text>\n";
    }
    if (!y_label.empty()) {
        svg << "  <text x=\"14\" y=\"" << fmt2((y0 + y1) / 2)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
               "transform=\"rotate(-90 14 "
            << fmt2((y0 + y1) / 2) << ")\">" << xml_escape(y_label) << "</text>\n";
    }
}

}  // namespace

std::string runlog_to_csv(const RunLog& log) {
    std::ostringstream out;
    out << "step,mean_reward,q_ratio,loss,mean_kl,clip_or_rollback_frac,wall_ms\n";
    for (const StepRecord& r : log.steps) {
        out << r.step << ',' << format_full(r.mean_reward) << ',' << format_full(r.q_ratio) << ','
            << format_full(r.loss) << ',' << format_full(r.mean_kl) << ','
            << format_full(r.clip_or_rollback_frac) << ',' << format_full(r.wall_ms) << '\n';
    }
    return out.str();
}

void write_text_file(const std::string& text, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << text;
    if (!out) throw IoError("write failed: " + path);
}

void write_runlog_csv(const RunLog& log, const std::string& path) {
    write_text_file(runlog_to_csv(log), path);
}

RunLog read_runlog_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty run log: " + path);
    if (line != "step,mean_reward,q_ratio,loss,mean_kl,clip_or_rollback_frac,wall_ms") {
        throw IoError("unexpected run-log header in " + path);
    }
    RunLog log;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string field;
        StepRecord rec;
        double* const targets[] = {&rec.mean_reward, &rec.q_ratio,  &rec.loss,
                                   &rec.mean_kl,     &rec.clip_or_rollback_frac, &rec.wall_ms};
        if (!std::getline(row, field, ',')) throw IoError("short row in " + path);
        rec.step = std::atoi(field.c_str());
        for (double* target : targets) {
            if (!std::getline(row, field, ',')) throw IoError("short row in " + path);
            *target = std::strtod(field.c_str(), nullptr);
        }
        log.steps.push_back(rec);
    }
    return log;
}

std::string render_line_chart(const PlotSpec& spec) {
    if (spec.series.empty()) throw ConfigError("render_line_chart: no series");
    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
    double ylo = xlo, yhi = -xlo;
    for (const Series& s : spec.series) {
        if (s.x.empty()) throw ConfigError("render_line_chart: empty series '" + s.name + "'");
        if (s.x.size() != s.y.size()) {
            throw ConfigError("render_line_chart: x/y length mismatch in series '" + s.name + "'");
        }
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
                throw ConfigError("render_line_chart: non-finite value in series '" + s.name + "'");
            }
            xlo = std::min(xlo, s.x[i]);
            xhi = std::max(xhi, s.x[i]);
            ylo = std::min(ylo, s.y[i]);
            yhi = std::max(yhi, s.y[i]);
        }
    }

    Viewport vp{tight_range(xlo, xhi), tight_range(ylo, yhi)};
    std::ostringstream svg;
    open_svg(svg, spec.title);
    draw_axes(svg, vp, spec.x_label, spec.y_label);

    for (std::size_t si = 0; si < spec.series.size(); ++si) {
        const Series& s = spec.series[si];
        const char* color = kSeriesColors[si % (sizeof(kSeriesColors) / sizeof(*kSeriesColors))];
        if (s.x.size() == 1) {
            svg << "  <circle cx=\"" << fmt2(vp.map_x(s.x[0])) << "\" cy=\""
                << fmt2(vp.map_y(s.y[0])) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        } else {
            svg << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (i) svg << ' ';
                svg << fmt2(vp.map_x(s.x[i])) << ',' << fmt2(vp.map_y(s.y[i]));
            }
            svg << "\"/>\n";
        }
        if (!s.name.empty()) {
            const double ly = kMarginTop + 14.0 * static_cast<double>(si);
            svg << "  <rect x=\"" << fmt2(kWidth - kMarginRight - 110) << "\" y=\"" << fmt2(ly - 8)
                << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n";
            svg << "  <text x=\"" << fmt2(kWidth - kMarginRight - 96) << "\" y=\"" << fmt2(ly + 1)
                << "\" font-family=\"sans-serif\" font-size=\"11\">" << xml_escape(s.name)
                << "</text>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string render_scatter(const std::vector<Vec>& points, const std::vector<ClassLabel>& labels,
                           const std::string& title) {
    if (points.size() != labels.size()) {
        throw ShapeError("render_scatter: one label per point required");
    }
    for (const Vec& p : points) {
        if (p.size() != 2) throw ShapeError("render_scatter: points must be 2-dimensional");
    }

    double xlo = -1.0, xhi = 1.0, ylo = -1.0, yhi = 1.0;
    if (!points.empty()) {
        xlo = ylo = std::numeric_limits<double>::infinity();
        xhi = yhi = -xlo;
        for (const Vec& p : points) {
            xlo = std::min(xlo, p[0]);
            xhi = std::max(xhi, p[0]);
            ylo = std::min(ylo, p[1]);
            yhi = std::max(yhi, p[1]);
        }
        // A touch of breathing room so boundary markers stay visible.
        const double pad_x = 0.05 * (xhi - xlo + 1.0);
        const double pad_y = 0.05 * (yhi - ylo + 1.0);
        xlo -= pad_x;
        xhi += pad_x;
        ylo -= pad_y;
        yhi += pad_y;
    }

    Viewport vp{tight_range(xlo, xhi), tight_range(ylo, yhi)};
    std::ostringstream svg;
    open_svg(svg, title);
    draw_axes(svg, vp, "x1", "x2");

    auto color_of = [](ClassLabel label) {
        switch (label) {
            case ClassLabel::A: return "#d62728";
            case ClassLabel::B: return "#1f77b4";
            case ClassLabel::None: return "#7f7f7f";
        }
        return "#000000";
    };

    for (std::size_t i = 0; i < points.size(); ++i) {
        svg << "  <circle cx=\"" << fmt2(vp.map_x(points[i][0])) << "\" cy=\""
            << fmt2(vp.map_y(points[i][1])) << "\" r=\"2.5\" fill=\"" << color_of(labels[i])
            << "\" fill-opacity=\"0.75\"/>\n";
    }

    // Legend: only the classes actually present.
    bool present[3] = {false, false, false};
    for (ClassLabel l : labels) present[static_cast<int>(l)] = true;
    double ly = kMarginTop;
    for (ClassLabel l : {ClassLabel::A, ClassLabel::B, ClassLabel::None}) {
        if (!present[static_cast<int>(l)]) continue;
        svg << "  <circle cx=\"" << fmt2(kWidth - kMarginRight - 104) << "\" cy=\"" << fmt2(ly - 3)
            << "\" r=\"4\" fill=\"" << color_of(l) << "\"/>\n";
        svg << "  <text x=\"" << fmt2(kWidth - kMarginRight - 94) << "\" y=\"" << fmt2(ly + 1)
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << to_string(l) << "</text>\n";
        ly += 14.0;
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace fairdiff
