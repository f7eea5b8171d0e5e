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

// Hand-built operators, hosts and queries shared by the tests.

#pragma once

#include <streamcost/generate.hpp>
#include <streamcost/graph.hpp>
#include <streamcost/optimize.hpp>

#include <random>
#include <string>
#include <vector>

namespace fixtures {

using namespace streamcost;

inline OperatorNode source(const std::string& id, double rate, double width = 4) {
    OperatorNode n{id, OperatorKind::Source, {}};
    n.features.input_event_rate = rate;
    n.features.tuple_width_out = width;
    n.features.tuple_data_types = {static_cast<int>(width), 0, 0};
    return n;
}

inline OperatorNode filter(const std::string& id, double sel, double width = 4) {
    OperatorNode n{id, OperatorKind::Filter, {}};
    n.features.tuple_width_in = width;
    n.features.tuple_width_out = width;
    n.features.selectivity = sel;
    return n;
}

inline WindowSpec count_window(double size) { return WindowSpec{WindowType::Tumbling, WindowPolicy::Count, size, {}}; }
inline WindowSpec time_window(double seconds) {
    return WindowSpec{WindowType::Tumbling, WindowPolicy::Time, seconds, {}};
}

inline OperatorNode aggregation(const std::string& id, double sel, WindowSpec w, double width = 4) {
    OperatorNode n{id, OperatorKind::WindowedAggregation, {}};
    n.features.tuple_width_in = width;
    n.features.tuple_width_out = 2;
    n.features.selectivity = sel;
    n.features.window = w;
    return n;
}

inline OperatorNode join(const std::string& id, double sel, WindowSpec w, double width = 4) {
    OperatorNode n{id, OperatorKind::WindowedJoin, {}};
    n.features.tuple_width_in = width;
    n.features.tuple_width_out = 2 * width;
    n.features.selectivity = sel;
    n.features.window = w;
    return n;
}

inline OperatorNode sink(const std::string& id, double width = 4) {
    OperatorNode n{id, OperatorKind::Sink, {}};
    n.features.tuple_width_in = width;
    n.features.tuple_width_out = width;
    return n;
}

inline HardwareNode host(const std::string& id, double cpu = 100, double ram = 8000, double bw = 1000,
                         double lat = 5) {
    return HardwareNode{id, cpu, ram, bw, lat};
}

/// source -> filter(sel) -> sink
inline QueryGraph chain(double rate = 1000, double sel = 0.5) {
    QueryGraph q;
    q.operators = {source("s", rate), filter("f", sel), sink("k")};
    q.edges = {{"s", "f"}, {"f", "k"}};
    return q;
}

/// Two sources joined, then a sink.
inline QueryGraph two_way(double rate1 = 100, double rate2 = 100, double sel = 0.01, WindowSpec w = time_window(2)) {
    QueryGraph q;
    q.operators = {source("a", rate1), source("b", rate2), join("j", sel, w), sink("k", 8)};
    q.edges = {{"a", "j"}, {"b", "j"}, {"j", "k"}};
    return q;
}

inline Placement place_all(const QueryGraph& q, const std::string& host_id) {
    Placement p;
    for (const auto& op : q.operators) p.assignment[op.id] = host_id;
    return p;
}

/// A random generated query with hosts and one rule-satisfying placement.
struct Instance {
    QueryGraph query;
    std::vector<HardwareNode> hardware;
    Placement placement;
    JointGraph graph;
};

inline Instance random_instance(std::uint64_t seed, const GenConfig& cfg = {}) {
    auto rng = item_rng(seed, 0);
    Instance in;
    in.query = sample_query(cfg, rng);
    in.hardware = sample_hardware(cfg, rng, in.query.operators.size());
    in.placement = enumerate_candidates(in.query, in.hardware, 1, rng, cfg.bins).front();
    in.graph = build_joint_graph(in.query, in.hardware, in.placement);
    return in;
}

}  // namespace fixtures
