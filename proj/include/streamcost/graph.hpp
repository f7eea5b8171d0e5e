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

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace streamcost {

enum class OperatorKind { Source, Filter, WindowedAggregation, WindowedJoin, Sink };
enum class DataType { Int, String, Double };
enum class FilterFunction { Less, Greater, LessEqual, GreaterEqual, NotEqual, StartsWith, EndsWith };
enum class AggFunction { Min, Max, Mean, Sum };
enum class GroupByType { Int, String, Double, None };
enum class WindowType { Sliding, Tumbling };
enum class WindowPolicy { Count, Time };

inline constexpr std::size_t kDataTypeCount = 3;
inline constexpr std::size_t kFilterFunctionCount = 7;
inline constexpr std::size_t kAggFunctionCount = 4;
inline constexpr std::size_t kGroupByTypeCount = 4;

/// Window of a windowed aggregation or join. `size` is in tuples (count policy)
/// or seconds (time policy); `slide` uses the same unit and is set only for
/// sliding windows.
struct WindowSpec {
    WindowType type = WindowType::Tumbling;
    WindowPolicy policy = WindowPolicy::Count;
    double size = 1.0;
    std::optional<double> slide;

    bool operator==(const WindowSpec&) const = default;
};

/// Transferable operator features. Which members are meaningful depends on the
/// operator kind; validate_query checks the presence rules.
struct OperatorFeatures {
    double tuple_width_in = 0.0;
    double tuple_width_out = 0.0;

    // Source
    double input_event_rate = 0.0;
    std::array<int, kDataTypeCount> tuple_data_types{};  // field count per DataType

    // Filter
    FilterFunction filter_function = FilterFunction::Less;
    DataType literal_data_type = DataType::Int;

    // Join
    DataType join_key_data_type = DataType::Int;

    // Aggregation
    AggFunction agg_function = AggFunction::Min;
    GroupByType group_by_data_type = GroupByType::None;
    DataType agg_data_type = DataType::Int;

    // Filter, join, aggregation
    double selectivity = 1.0;

    // Windowed aggregation and join
    std::optional<WindowSpec> window;

    bool operator==(const OperatorFeatures&) const = default;
};

struct OperatorNode {
    std::string id;
    OperatorKind kind = OperatorKind::Source;
    OperatorFeatures features;

    bool operator==(const OperatorNode&) const = default;
};

struct DataflowEdge {
    std::string from;
    std::string to;

    bool operator==(const DataflowEdge&) const = default;
};

struct QueryGraph {
    std::vector<OperatorNode> operators;
    std::vector<DataflowEdge> edges;

    [[nodiscard]] const OperatorNode* find(const std::string& id) const;
    bool operator==(const QueryGraph&) const = default;
};

struct HardwareNode {
    std::string id;
    double cpu = 100.0;            // percent of a reference core
    double ram = 1000.0;           // MB
    double net_bandwidth = 100.0;  // Mbit/s, outgoing
    double net_latency = 1.0;      // ms, outgoing

    bool operator==(const HardwareNode&) const = default;
};

struct Placement {
    std::map<std::string, std::string> assignment;  // operator id -> hardware id

    bool operator==(const Placement&) const = default;
};

/// Query, used hosts and placement with derived edge sets. Operators are kept
/// in canonical topological order (ties broken by id), hosts sorted by id;
/// all index-based edges refer to these orders.
struct JointGraph {
    QueryGraph query;
    std::vector<HardwareNode> hardware;
    Placement placement;

    std::vector<std::pair<std::size_t, std::size_t>> dataflow_edges;   // op -> op
    std::vector<std::pair<std::size_t, std::size_t>> placement_edges;  // op -> hw
    std::vector<std::pair<std::size_t, std::size_t>> reverse_edges;    // hw -> op

    std::vector<std::size_t> host_of;                        // per op
    std::vector<std::vector<std::size_t>> predecessors;      // per op, ascending
    std::vector<std::vector<std::size_t>> successors;        // per op, ascending
    std::vector<std::vector<std::size_t>> operators_on;      // per hw, ascending

    [[nodiscard]] std::size_t operator_count() const { return query.operators.size(); }
    [[nodiscard]] std::size_t hardware_count() const { return hardware.size(); }
    [[nodiscard]] std::size_t node_count() const { return operator_count() + hardware_count(); }
    [[nodiscard]] std::size_t sink_index() const;
    [[nodiscard]] std::vector<std::size_t> source_indices() const;

    bool operator==(const JointGraph&) const = default;
};

struct CostVector {
    double throughput = 0.0;                // tuples/s
    std::optional<double> proc_latency;     // ms, absent when success = false
    std::optional<double> e2e_latency;      // ms, absent when success = false
    bool backpressure = false;
    bool success = true;

    bool operator==(const CostVector&) const = default;
};

enum class Metric { Throughput, ProcLatency, E2ELatency, Backpressure, Success };
inline constexpr std::array<Metric, 5> kAllMetrics = {Metric::Throughput, Metric::ProcLatency,
                                                     Metric::E2ELatency, Metric::Backpressure,
                                                     Metric::Success};
inline constexpr std::array<Metric, 3> kRegressionMetrics = {
    Metric::Throughput, Metric::ProcLatency, Metric::E2ELatency};

[[nodiscard]] bool is_binary(Metric m);
/// Short tag (T, L_p, L_e, R_O, S).
[[nodiscard]] std::string metric_tag(Metric m);
/// Long name (throughput, proc_latency, ...).
[[nodiscard]] std::string metric_name(Metric m);
/// Accepts either the tag or the long name.
[[nodiscard]] Metric parse_metric(const std::string& s);
/// Regression value or 0/1 for binary metrics; nullopt when undefined.
[[nodiscard]] std::optional<double> metric_value(const CostVector& c, Metric m);

[[nodiscard]] std::string to_string(OperatorKind k);
[[nodiscard]] bool is_windowed(OperatorKind k);

/// Empty iff all structural invariants hold.
[[nodiscard]] std::vector<std::string> validate_query(const QueryGraph& q);

[[nodiscard]] JointGraph build_joint_graph(const QueryGraph& q, const std::vector<HardwareNode>& hw,
                                           const Placement& p);

/// Operator ids in dataflow order, ties broken by id.
[[nodiscard]] std::vector<std::string> topological_order(const QueryGraph& q);
[[nodiscard]] std::vector<std::string> topological_order(const JointGraph& g);

}  // namespace streamcost
