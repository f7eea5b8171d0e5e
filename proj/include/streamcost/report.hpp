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

#pragma once

#include <streamcost/dataset.hpp>

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace streamcost {

/// Every object in `report` holding an "n" field becomes one CSV row; the path
/// of keys leading to it forms the leading columns.
[[nodiscard]] std::string cells_csv(const json& report);

/// Plain SVG bar chart; values are drawn on a log scale when `log_scale`.
[[nodiscard]] std::string bar_chart_svg(const std::string& title, const std::vector<std::pair<std::string, double>>& bars,
                                        const std::string& y_label, bool log_scale = false);

/// Writes `<stem>.json`, `<stem>.csv` and one `<stem>_<metric>.svg` per
/// q50-bearing metric into `dir`.
void write_report_bundle(const std::filesystem::path& dir, const std::string& stem, const json& report);

}  // namespace streamcost
