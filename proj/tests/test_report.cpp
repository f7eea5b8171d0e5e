/*
    Copyright (C) 2026 The streamcost Authors

    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

#include <streamcost/report.hpp>

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace streamcost;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("cells become CSV rows keyed by their path") {
    const json report = {{"v", 1},
                         {"in_range", {{"throughput", {{"n", 10}, {"q50", 1.5}, {"q95", 3.25}}}}},
                         {"placement", {{"linear", {{"gnn", {{"n", 4}, {"median_speedup", 2.0}}}}}}},
                         {"binary", {{"success", {{"n", 8}, {"accuracy", 0.875}}}}},
                         {"list", json::array({{{"n", 1}, {"q50", 1.0}}})}};
    const auto csv = cells_csv(report);
    CHECK(csv ==
          "path,n,q50,q95,accuracy,median_speedup\n"
          "binary/success,8,,,0.875,\n"
          "in_range/throughput,10,1.5,3.25,,\n"
          "list/0,1,1,,,\n"
          "placement/linear/gnn,4,,,,2\n");
}

TEST_CASE("CSV quotes awkward path segments") {
    const json report = {{"a,b", {{"n", 1}}}};
    CHECK(cells_csv(report) == "path,n,q50,q95,accuracy,median_speedup\n\"a,b\",1,,,,\n");
}

TEST_CASE("bar chart SVG") {
    const auto svg = bar_chart_svg("Q <50>", {{"a", 1.5}, {"b", 10.0}, {"c&d", 100.0}}, "q-error", true);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("Q &lt;50&gt;") != std::string::npos);
    CHECK(svg.find("c&amp;d") != std::string::npos);
    std::size_t rects = 0;
    for (std::size_t pos = svg.find("<rect x="); pos != std::string::npos; pos = svg.find("<rect x=", pos + 1)) ++rects;
    CHECK(rects == 3);
    CHECK(bar_chart_svg("t", {{"a", 2.0}}, "y") == bar_chart_svg("t", {{"a", 2.0}}, "y"));
}

TEST_CASE("report bundle files") {
    const auto dir = std::filesystem::temp_directory_path() / "streamcost_report_test";
    std::filesystem::remove_all(dir);
    const json report = {{"in_range", {{"throughput", {{"n", 10}, {"q50", 1.5}}}}},
                         {"shifted", {{"throughput", {{"n", 10}, {"q50", 2.5}}}}},
                         {"rows", {{"gnn", {{"n", 3}, {"median_speedup", 4.0}}}}}};
    write_report_bundle(dir, "demo", report);
    CHECK(std::filesystem::exists(dir / "demo.json"));
    CHECK(slurp(dir / "demo.csv") == cells_csv(report));
    CHECK(json::parse(slurp(dir / "demo.json")) == report);
    const auto chart = slurp(dir / "demo_throughput.svg");
    CHECK(chart.find("in_range") != std::string::npos);
    CHECK(chart.find("shifted") != std::string::npos);
    CHECK(std::filesystem::exists(dir / "demo_speedup.svg"));
    std::filesystem::remove_all(dir);
}
