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

#include <streamcost/error.hpp>
#include <streamcost/graph.hpp>

#include <algorithm>
#include <queue>
#include <set>
#include <unordered_map>

namespace streamcost {

const OperatorNode* QueryGraph::find(const std::string& id) const {
    for (const auto& op : operators)
        if (op.id == id) return &op;
    return nullptr;
}

std::size_t JointGraph::sink_index() const {
    for (std::size_t i = 0; i < query.operators.size(); ++i)
        if (query.operators[i].kind == OperatorKind::Sink) return i;
    throw Error(ErrorCode::InvalidQuery, "joint graph has no sink");
}

std::vector<std::size_t> JointGraph::source_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < query.operators.size(); ++i)
        if (query.operators[i].kind == OperatorKind::Source) out.push_back(i);
    return out;
}

bool is_binary(Metric m) { return m == Metric::Backpressure || m == Metric::Success; }

std::string metric_tag(Metric m) {
    switch (m) {
        case Metric::Throughput: return "T";
        case Metric::ProcLatency: return "L_p";
        case Metric::E2ELatency: return "L_e";
        case Metric::Backpressure: return "R_O";
        case Metric::Success: return "S";
    }
    return "?";
}

std::string metric_name(Metric m) {
    switch (m) {
        case Metric::Throughput: return "throughput";
        case Metric::ProcLatency: return "proc_latency";
        case Metric::E2ELatency: return "e2e_latency";
        case Metric::Backpressure: return "backpressure";
        case Metric::Success: return "success";
    }
    return "?";
}

Metric parse_metric(const std::string& s) {
    for (Metric m : kAllMetrics)
        if (s == metric_tag(m) || s == metric_name(m)) return m;
    throw Error(ErrorCode::InvalidArgument, "unknown metric '" + s + "'");
}

std::optional<double> metric_value(const CostVector& c, Metric m) {
    switch (m) {
        case Metric::Throughput:
            if (!c.success) return std::nullopt;
            return c.throughput;
        case Metric::ProcLatency: return c.success ? c.proc_latency : std::nullopt;
        case Metric::E2ELatency: return c.success ? c.e2e_latency : std::nullopt;
        case Metric::Backpressure: return c.backpressure ? 1.0 : 0.0;
        case Metric::Success: return c.success ? 1.0 : 0.0;
    }
    return std::nullopt;
}

std::string to_string(OperatorKind k) {
    switch (k) {
        case OperatorKind::Source: return "source";
        case OperatorKind::Filter: return "filter";
        case OperatorKind::WindowedAggregation: return "aggregation";
        case OperatorKind::WindowedJoin: return "join";
        case OperatorKind::Sink: return "sink";
    }
    return "?";
}

bool is_windowed(OperatorKind k) {
    return k == OperatorKind::WindowedAggregation || k == OperatorKind::WindowedJoin;
}

namespace {

std::size_t expected_in_degree(OperatorKind k) {
    switch (k) {
        case OperatorKind::Source: return 0;
        case OperatorKind::WindowedJoin: return 2;
        default: return 1;
    }
}

// Kahn's algorithm over operator indices with ties broken by id. Returns fewer
// than n entries when the graph has a cycle.
std::vector<std::size_t> kahn_order(const QueryGraph& q) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < q.operators.size(); ++i) index.emplace(q.operators[i].id, i);
    std::vector<std::vector<std::size_t>> out(q.operators.size());
    std::vector<std::size_t> indeg(q.operators.size(), 0);
    for (const auto& e : q.edges) {
        auto f = index.find(e.from);
        auto t = index.find(e.to);
        if (f == index.end() || t == index.end()) continue;
        out[f->second].push_back(t->second);
        ++indeg[t->second];
    }
    auto by_id = [&](std::size_t a, std::size_t b) { return q.operators[a].id > q.operators[b].id; };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(by_id)> ready(by_id);
    for (std::size_t i = 0; i < indeg.size(); ++i)
        if (indeg[i] == 0) ready.push(i);
    std::vector<std::size_t> order;
    while (!ready.empty()) {
        std::size_t v = ready.top();
        ready.pop();
        order.push_back(v);
        for (std::size_t w : out[v])
            if (--indeg[w] == 0) ready.push(w);
    }
    return order;
}

void validate_features(const OperatorNode& op, std::vector<std::string>& out) {
    const auto& f = op.features;
    const std::string who = to_string(op.kind) + " " + op.id;
    if (!(f.tuple_width_in > 0.0) && op.kind != OperatorKind::Source)
        out.push_back(who + " has non-positive tuple_width_in");
    if (!(f.tuple_width_out > 0.0)) out.push_back(who + " has non-positive tuple_width_out");
    if (op.kind == OperatorKind::Source && !(f.input_event_rate > 0.0))
        out.push_back(who + " has non-positive input_event_rate");
    const bool has_sel = op.kind == OperatorKind::Filter || op.kind == OperatorKind::WindowedJoin ||
                         op.kind == OperatorKind::WindowedAggregation;
    if (has_sel && !(f.selectivity >= 0.0 && f.selectivity <= 1.0))
        out.push_back(who + " has selectivity outside [0,1]");
    if (is_windowed(op.kind)) {
        if (!f.window) {
            out.push_back(who + " is windowed but has no window");
        } else {
            const auto& w = *f.window;
            if (!(w.size > 0.0)) out.push_back(who + " has non-positive window size");
            if (w.type == WindowType::Sliding && !w.slide)
                out.push_back(who + " has a sliding window without slide size");
            if (w.type == WindowType::Tumbling && w.slide)
                out.push_back(who + " has a tumbling window with a slide size");
            if (w.slide && !(*w.slide > 0.0 && *w.slide <= w.size))
                out.push_back(who + " has slide size outside (0, window size]");
        }
    } else if (f.window) {
        out.push_back(who + " is not windowed but carries a window");
    }
}

}  // namespace

std::vector<std::string> validate_query(const QueryGraph& q) {
    std::vector<std::string> out;
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < q.operators.size(); ++i) {
        if (!index.emplace(q.operators[i].id, i).second)
            out.push_back("duplicate operator id " + q.operators[i].id);
    }
    if (q.operators.empty()) {
        out.push_back("query has no operators");
        return out;
    }
    const std::size_t n = q.operators.size();
    std::vector<std::size_t> indeg(n, 0), outdeg(n, 0);
    std::vector<std::vector<std::size_t>> succ(n), pred(n);
    for (const auto& e : q.edges) {
        auto f = index.find(e.from);
        auto t = index.find(e.to);
        if (f == index.end() || t == index.end()) {
            out.push_back("edge " + e.from + "->" + e.to + " references an unknown operator");
            continue;
        }
        ++outdeg[f->second];
        ++indeg[t->second];
        succ[f->second].push_back(t->second);
        pred[t->second].push_back(f->second);
    }

    auto order = kahn_order(q);
    if (order.size() != n) {
        std::set<std::size_t> seen(order.begin(), order.end());
        std::string members;
        for (std::size_t i = 0; i < n; ++i)
            if (!seen.count(i)) members += (members.empty() ? "" : ",") + q.operators[i].id;
        out.push_back("cycle detected among operators {" + members + "}");
    }

    std::size_t sinks = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& op = q.operators[i];
        const std::size_t want = expected_in_degree(op.kind);
        if (indeg[i] != want) {
            out.push_back(to_string(op.kind) + " " + op.id + " has in-degree " + std::to_string(indeg[i]) +
                          ", expected " + std::to_string(want));
        }
        if (op.kind == OperatorKind::Sink) {
            ++sinks;
            if (outdeg[i] != 0)
                out.push_back("sink " + op.id + " has out-degree " + std::to_string(outdeg[i]) + ", expected 0");
        }
        validate_features(op, out);
    }
    if (sinks != 1) out.push_back("query has " + std::to_string(sinks) + " sinks, expected exactly 1");

    // Every operator must be reachable from a source and reach the sink.
    std::vector<char> from_source(n, 0), to_sink(n, 0);
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < n; ++i)
        if (q.operators[i].kind == OperatorKind::Source) {
            from_source[i] = 1;
            stack.push_back(i);
        }
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        for (auto w : succ[v])
            if (!from_source[w]) {
                from_source[w] = 1;
                stack.push_back(w);
            }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (q.operators[i].kind == OperatorKind::Sink) {
            to_sink[i] = 1;
            stack.push_back(i);
        }
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        for (auto w : pred[v])
            if (!to_sink[w]) {
                to_sink[w] = 1;
                stack.push_back(w);
            }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!from_source[i] || !to_sink[i])
            out.push_back("operator " + q.operators[i].id + " is not on a source-to-sink path");
    return out;
}

std::vector<std::string> topological_order(const QueryGraph& q) {
    auto order = kahn_order(q);
    if (order.size() != q.operators.size())
        throw Error(ErrorCode::CycleDetected, "query dataflow contains a cycle");
    std::vector<std::string> ids;
    ids.reserve(order.size());
    for (auto i : order) ids.push_back(q.operators[i].id);
    return ids;
}

std::vector<std::string> topological_order(const JointGraph& g) { return topological_order(g.query); }

JointGraph build_joint_graph(const QueryGraph& q, const std::vector<HardwareNode>& hw, const Placement& p) {
    if (auto v = validate_query(q); !v.empty()) throw Error(ErrorCode::InvalidQuery, v.front());

    std::unordered_map<std::string, const HardwareNode*> hw_by_id;
    for (const auto& h : hw) {
        if (!(h.cpu > 0 && h.ram > 0 && h.net_bandwidth > 0 && h.net_latency > 0))
            throw Error(ErrorCode::InvalidArgument, "hardware node " + h.id + " has non-positive resources");
        if (!hw_by_id.emplace(h.id, &h).second)
            throw Error(ErrorCode::InvalidArgument, "duplicate hardware id " + h.id);
    }
    for (const auto& [op_id, hw_id] : p.assignment) {
        if (!q.find(op_id)) throw Error(ErrorCode::InvalidArgument, "placement names unknown operator " + op_id);
        if (!hw_by_id.count(hw_id))
            throw Error(ErrorCode::UnknownHardware, "operator " + op_id + " placed on unknown host " + hw_id);
    }

    JointGraph g;
    g.placement = p;
    g.query.edges = q.edges;
    std::sort(g.query.edges.begin(), g.query.edges.end(), [](const auto& a, const auto& b) {
        return std::tie(a.from, a.to) < std::tie(b.from, b.to);
    });

    std::unordered_map<std::string, std::size_t> op_index;
    for (const auto& id : topological_order(q)) {
        op_index.emplace(id, g.query.operators.size());
        g.query.operators.push_back(*q.find(id));
    }

    std::set<std::string> used;
    for (const auto& op : g.query.operators) {
        auto it = p.assignment.find(op.id);
        if (it == p.assignment.end())
            throw Error(ErrorCode::MissingAssignment, "operator " + op.id + " is not placed");
        used.insert(it->second);
    }
    std::unordered_map<std::string, std::size_t> hw_index;
    for (const auto& id : used) {  // std::set iterates in sorted id order
        hw_index.emplace(id, g.hardware.size());
        g.hardware.push_back(*hw_by_id.at(id));
    }

    const std::size_t n = g.query.operators.size();
    g.host_of.resize(n);
    g.predecessors.assign(n, {});
    g.successors.assign(n, {});
    g.operators_on.assign(g.hardware.size(), {});
    for (const auto& e : g.query.edges) {
        auto a = op_index.at(e.from), b = op_index.at(e.to);
        g.dataflow_edges.emplace_back(a, b);
        g.predecessors[b].push_back(a);
        g.successors[a].push_back(b);
    }
    std::sort(g.dataflow_edges.begin(), g.dataflow_edges.end());
    for (auto& v : g.predecessors) std::sort(v.begin(), v.end());
    for (auto& v : g.successors) std::sort(v.begin(), v.end());
    for (std::size_t i = 0; i < n; ++i) {
        auto h = hw_index.at(p.assignment.at(g.query.operators[i].id));
        g.host_of[i] = h;
        g.operators_on[h].push_back(i);
        g.placement_edges.emplace_back(i, h);
        g.reverse_edges.emplace_back(h, i);
    }
    return g;
}

}  // namespace streamcost
