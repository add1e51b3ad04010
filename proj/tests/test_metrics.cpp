// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "fairdiff/errors.hpp"
#include "fairdiff/metrics.hpp"

using namespace fairdiff;

namespace {

// Minimal XML well-formedness check: single root, balanced tags, quoted
// attributes. Enough to catch broken emission without a real parser.
bool xml_well_formed(const std::string& doc) {
    std::size_t i = 0;
    // optional prolog
    if (doc.rfind("<?xml", 0) == 0) {
        i = doc.find("?>");
        if (i == std::string::npos) return false;
        i += 2;
    }
    std::vector<std::string> stack;
    bool seen_root = false;
    while (i < doc.size()) {
        if (doc[i] != '<') {
            ++i;
            continue;
        }
        const std::size_t close = doc.find('>', i);
        if (close == std::string::npos) return false;
        std::string tag = doc.substr(i + 1, close - i - 1);
        // attribute quotes must pair up
        int quotes = 0;
        for (char c : tag) quotes += c == '"' ? 1 : 0;
        if (quotes % 2 != 0) return false;

        if (!tag.empty() && tag[0] == '/') {
            if (stack.empty()) return false;
            const std::string name = tag.substr(1);
            if (stack.back() != name) return false;
            stack.pop_back();
        } else if (!tag.empty() && tag.back() == '/') {
            if (stack.empty() && seen_root) return false;  // second root
        } else if (!tag.empty()) {
            std::string name = tag.substr(0, tag.find_first_of(" \t\n"));
            if (stack.empty() && seen_root) return false;
            stack.push_back(name);
            seen_root = true;
        }
        i = close + 1;
    }
    return stack.empty() && seen_root;
}

int count_occurrences(const std::string& hay, const std::string& needle) {
    int n = 0;
    for (std::size_t pos = hay.find(needle); pos != std::string::npos;
         pos = hay.find(needle, pos + needle.size())) {
        ++n;
    }
    return n;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("run log CSV structure and round trip") {
    RunLog log;

    SUBCASE("empty log is a header-only file") {
        const std::string csv = runlog_to_csv(log);
        CHECK(csv == "step,mean_reward,q_ratio,loss,mean_kl,clip_or_rollback_frac,wall_ms\n");
    }

    SUBCASE("three steps give four lines and read back exactly") {
        for (int i = 0; i < 3; ++i) {
            StepRecord r;
            r.step = i;
            r.mean_reward = 0.1 * i + 1.0 / 3.0;
            r.q_ratio = 0.5 - 0.01 * i;
            r.loss = -1e-7 * i;
            r.mean_kl = 1e-5 * i;
            r.clip_or_rollback_frac = 0.25 * i;
            r.wall_ms = 17.125 + i;
            log.steps.push_back(r);
        }
        const std::string csv = runlog_to_csv(log);
        CHECK(count_occurrences(csv, "\n") == 4);

        const std::string path = temp_path("fairdiff_test_runlog.csv");
        write_runlog_csv(log, path);
        const RunLog back = read_runlog_csv(path);
        REQUIRE(back.steps.size() == 3);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(back.steps[i].step == log.steps[i].step);
            CHECK(back.steps[i].mean_reward == log.steps[i].mean_reward);
            CHECK(back.steps[i].q_ratio == log.steps[i].q_ratio);
            CHECK(back.steps[i].loss == log.steps[i].loss);
            CHECK(back.steps[i].mean_kl == log.steps[i].mean_kl);
            CHECK(back.steps[i].clip_or_rollback_frac == log.steps[i].clip_or_rollback_frac);
            CHECK(back.steps[i].wall_ms == log.steps[i].wall_ms);
        }
        std::remove(path.c_str());
    }

    SUBCASE("unwritable path reports the path") {
        CHECK_THROWS_AS(write_runlog_csv(log, "/nonexistent-dir/x.csv"), IoError);
    }
}

TEST_CASE("line charts") {
    SUBCASE("single point renders a marker and no polyline") {
        PlotSpec spec;
        spec.series.push_back({"loss", {1.0}, {2.0}});
        const std::string svg = render_line_chart(spec);
        CHECK(xml_well_formed(svg));
        CHECK(count_occurrences(svg, "<polyline") == 0);
        CHECK(count_occurrences(svg, "<circle") == 1);
    }

    SUBCASE("two points with tight axes hit the viewport corners") {
        PlotSpec spec;
        spec.series.push_back({"", {0.0, 1.0}, {0.0, 1.0}});
        const std::string svg = render_line_chart(spec);
        CHECK(xml_well_formed(svg));
        // Default geometry: x in [60, 620], y in [40, 355].
        CHECK(svg.find("60.00,355.00 620.00,40.00") != std::string::npos);
    }

    SUBCASE("constant series sits at mid-viewport with symmetric padding") {
        PlotSpec spec;
        spec.series.push_back({"flat", {0.0, 1.0, 2.0}, {5.0, 5.0, 5.0}});
        const std::string svg = render_line_chart(spec);
        CHECK(xml_well_formed(svg));
        // y range padded to [4,6]; 5.0 maps to the middle: 40 + (355-40)/2 = 197.5
        CHECK(svg.find("60.00,197.50") != std::string::npos);
    }

    SUBCASE("axis extremes are annotated") {
        PlotSpec spec;
        spec.series.push_back({"r", {0.0, 10.0}, {-2.5, 7.5}});
        const std::string svg = render_line_chart(spec);
        CHECK(svg.find(">10<") != std::string::npos);
        CHECK(svg.find(">-2.5<") != std::string::npos);
        CHECK(svg.find(">7.5<") != std::string::npos);
    }

    SUBCASE("empty series is a validation error") {
        PlotSpec spec;
        spec.series.push_back({"void", {}, {}});
        CHECK_THROWS_AS(render_line_chart(spec), ConfigError);
        CHECK_THROWS_AS(render_line_chart(PlotSpec{}), ConfigError);
    }

    SUBCASE("rendering is deterministic") {
        PlotSpec spec;
        spec.title = "reward";
        spec.series.push_back({"a", {0, 1, 2}, {0.1, 0.4, 0.9}});
        spec.series.push_back({"b", {0, 1, 2}, {1.0, 0.5, 0.25}});
        CHECK(render_line_chart(spec) == render_line_chart(spec));
    }
}

TEST_CASE("scatter plots") {
    SUBCASE("empty batch renders axes only") {
        const std::string svg = render_scatter({}, {}, "empty");
        CHECK(xml_well_formed(svg));
        CHECK(count_occurrences(svg, "<circle") == 0);
    }
    SUBCASE("single-class batch renders one legend entry") {
        std::vector<Vec> pts = {{0.0, 0.0}, {1.0, 1.0}};
        std::vector<ClassLabel> labels = {ClassLabel::A, ClassLabel::A};
        const std::string svg = render_scatter(pts, labels, "all A");
        CHECK(xml_well_formed(svg));
        CHECK(count_occurrences(svg, ">A<") == 1);
        CHECK(count_occurrences(svg, ">B<") == 0);
        CHECK(count_occurrences(svg, ">None<") == 0);
    }
    SUBCASE("marker count equals point count") {
        std::vector<Vec> pts;
        std::vector<ClassLabel> labels;
        for (int i = 0; i < 17; ++i) {
            pts.push_back({0.1 * i, -0.2 * i});
            labels.push_back(i % 3 == 0 ? ClassLabel::A : (i % 3 == 1 ? ClassLabel::B : ClassLabel::None));
        }
        const std::string svg = render_scatter(pts, labels, "mixed");
        CHECK(xml_well_formed(svg));
        // 17 data markers + 3 legend markers
        CHECK(count_occurrences(svg, "<circle") == 20);
    }
    SUBCASE("non-2d points are rejected") {
        CHECK_THROWS_AS(render_scatter({{1.0, 2.0, 3.0}}, {ClassLabel::A}, "bad"), ShapeError);
        CHECK_THROWS_AS(render_scatter({{1.0}}, {ClassLabel::A}, "bad"), ShapeError);
    }
}

TEST_CASE("format_full survives a strtod round trip") {
    for (double v : {1.0 / 3.0, 1e-300, -0.1, 12345.6789, 5e17, 0.0}) {
        const std::string s = format_full(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}
