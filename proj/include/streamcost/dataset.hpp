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

#include <streamcost/graph.hpp>

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace streamcost {

using json = nlohmann::json;

inline constexpr int kJsonlVersion = 1;

enum class Split { Train, Validation, Test, Extra };

std::string to_string(Split s);
Split parse_split(const std::string& s);

/// One JSONL line: a joint graph with an optional label and provenance.
struct Example {
    std::string id;
    std::string query_id;
    std::string family;  // linear, two_way, three_way, filter_chain_<k>
    Split split = Split::Train;
    JointGraph graph;
    std::optional<CostVector> label;

    bool operator==(const Example&) const = default;
};

void to_json(json& j, const WindowSpec& w);
void from_json(const json& j, WindowSpec& w);
void to_json(json& j, const OperatorNode& op);
void from_json(const json& j, OperatorNode& op);
void to_json(json& j, const QueryGraph& q);
void from_json(const json& j, QueryGraph& q);
void to_json(json& j, const HardwareNode& h);
void from_json(const json& j, HardwareNode& h);
void to_json(json& j, const Placement& p);
void from_json(const json& j, Placement& p);
void to_json(json& j, const CostVector& c);
void from_json(const json& j, CostVector& c);

/// Joint graphs serialize as (query, used hardware, placement); the derived
/// edge sets are rebuilt on load.
void to_json(json& j, const JointGraph& g);
void from_json(const json& j, JointGraph& g);

void to_json(json& j, const Example& e);
void from_json(const json& j, Example& e);

[[nodiscard]] std::string to_jsonl_line(const Example& e);
[[nodiscard]] Example parse_jsonl_line(const std::string& line);

void write_jsonl(const std::filesystem::path& path, const std::vector<Example>& examples);
[[nodiscard]] std::vector<Example> read_jsonl(const std::filesystem::path& path);

[[nodiscard]] json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// FNV-1a over the bytes; used for config hashes and parameter hashes.
[[nodiscard]] std::uint64_t fnv1a(std::string_view bytes);
[[nodiscard]] std::string hex64(std::uint64_t v);
[[nodiscard]] std::string hash_json(const json& j);

[[nodiscard]] std::vector<Example> filter_split(const std::vector<Example>& all, Split s);

}  // namespace streamcost
