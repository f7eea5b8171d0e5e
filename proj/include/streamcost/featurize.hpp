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
#include <streamcost/graph.hpp>

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace streamcost {

inline constexpr int kFeatureSchemaVersion = 1;
inline constexpr double kIqrFloor = 1e-6;

// Selectivity definitions. Inputs are counts; results are clamped to [0, 1].
[[nodiscard]] double filter_selectivity(std::uint64_t out_count, std::uint64_t in_count);
[[nodiscard]] double join_selectivity(std::uint64_t matches, std::uint64_t w1, std::uint64_t w2);
[[nodiscard]] double agg_selectivity(std::uint64_t distinct_groups, std::uint64_t window_len);

/// Node types of the joint graph; each has its own encoder and update network.
enum class NodeType { Source = 0, Filter, Aggregation, Join, Sink, Hardware };
inline constexpr std::size_t kNodeTypeCount = 6;

[[nodiscard]] NodeType node_type(OperatorKind k);
[[nodiscard]] std::string to_string(NodeType t);

/// What the model gets to see: everything, placement without hardware
/// features, or only the operator graph.
enum class Featurization { Full, NoHardware, OpsOnly };
[[nodiscard]] std::string to_string(Featurization f);
[[nodiscard]] Featurization parse_featurization(const std::string& s);

enum class Transform { Linear, Log1p, Log };

struct FeatureSlot {
    std::string name;
    Transform transform = Transform::Linear;  // numeric slots
    std::vector<std::string> vocabulary;      // non-empty for categorical slots

    [[nodiscard]] bool categorical() const { return !vocabulary.empty(); }
    [[nodiscard]] std::size_t width() const { return categorical() ? vocabulary.size() : 1; }
};

struct FeatureSchema {
    std::array<std::vector<FeatureSlot>, kNodeTypeCount> slots;

    [[nodiscard]] static const FeatureSchema& standard();
    [[nodiscard]] std::size_t width(NodeType t) const;
    [[nodiscard]] std::size_t numeric_count(NodeType t) const;
    [[nodiscard]] json describe() const;
};

struct RobustStat {
    double median = 0.0;
    double iqr = 1.0;  // interquartile range (mean absolute deviation if the quartiles coincide), floored

    bool operator==(const RobustStat&) const = default;
};

/// Per node type, one entry per numeric slot (schema order). A type that never
/// occurred in the fitting data has no statistics.
struct NormalizationStats {
    std::array<std::optional<std::vector<RobustStat>>, kNodeTypeCount> per_type;

    bool operator==(const NormalizationStats&) const = default;
};

void to_json(json& j, const NormalizationStats& s);
void from_json(const json& j, NormalizationStats& s);

/// Linear-interpolated percentile (q in [0,1]) of an unsorted sample.
[[nodiscard]] double percentile(std::vector<double> values, double q);

[[nodiscard]] NormalizationStats fit_stats(const std::vector<JointGraph>& dataset);

/// Raw (transformed, unscaled) numeric values in schema order.
[[nodiscard]] std::vector<double> numeric_values(const OperatorNode& node);
[[nodiscard]] std::vector<double> numeric_values(const HardwareNode& node);

[[nodiscard]] Eigen::VectorXd encode_node(const OperatorNode& node, const NormalizationStats& stats);
[[nodiscard]] Eigen::VectorXd encode_node(const HardwareNode& node, const NormalizationStats& stats);

}  // namespace streamcost
