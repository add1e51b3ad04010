// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "fairdiff/classifier.hpp"
#include "fairdiff/runlog.hpp"
#include "fairdiff/vec.hpp"

namespace fairdiff {

/// One named line series.
struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::vector<Series> series;
    std::string title;
    std::string x_label;
    std::string y_label;
};

/// Format a double with 17 significant digits, enough to round-trip exactly.
std::string format_full(double v);

/// CSV with header step,mean_reward,q_ratio,loss,mean_kl,clip_or_rollback_frac,wall_ms
/// and one row per step, all values at full precision.
std::string runlog_to_csv(const RunLog& log);
void write_runlog_csv(const RunLog& log, const std::string& path);

/// Parse a CSV produced by write_runlog_csv. Throws IoError on malformed input.
RunLog read_runlog_csv(const std::string& path);

/// Line chart as an SVG 1.1 document. Axes are tight around the data; a
/// degenerate (constant) range is padded symmetrically. A single-point series
/// renders a marker instead of a polyline. Throws ConfigError when a series
/// is empty or lengths disagree, ShapeError never.
std::string render_line_chart(const PlotSpec& spec);

/// Scatter of labelled 2-d points with a legend of the classes present.
/// Throws ShapeError unless every point has dimension 2.
std::string render_scatter(const std::vector<Vec>& points,
                           const std::vector<ClassLabel>& labels, const std::string& title);

void write_text_file(const std::string& text, const std::string& path);

}  // namespace fairdiff
