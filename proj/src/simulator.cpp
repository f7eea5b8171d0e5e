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
#include <streamcost/simulator.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace streamcost {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBytesPerMegabit = 125000.0;
constexpr double kBytesPerMegabyte = 1048576.0;

}  // namespace

double SimConfig::op_cost(OperatorKind k) const {
    switch (k) {
        case OperatorKind::Source: return cost_source;
        case OperatorKind::Filter: return cost_filter;
        case OperatorKind::WindowedAggregation: return cost_aggregation;
        case OperatorKind::WindowedJoin: return cost_join;
        case OperatorKind::Sink: return cost_sink;
    }
    return 1.0;
}

void SimConfig::validate() const {
    const double positive[] = {work_unit_rate, cost_source,  cost_filter,         cost_aggregation,
                               cost_join,      cost_sink,    bytes_per_field,     state_safety_factor,
                               exec_seconds,   min_service_slack};
    for (double v : positive)
        if (!(v > 0.0)) throw Error(ErrorCode::InvalidArgument, "simulator rates and costs must be positive");
    if (!(noise_sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise_sigma must be non-negative");
}

void to_json(json& j, const SimConfig& c) {
    j = json{{"work_unit_rate", c.work_unit_rate},
             {"op_cost",
              {{"source", c.cost_source},
               {"filter", c.cost_filter},
               {"aggregation", c.cost_aggregation},
               {"join", c.cost_join},
               {"sink", c.cost_sink}}},
             {"bytes_per_field", c.bytes_per_field},
             {"state_safety_factor", c.state_safety_factor},
             {"exec_seconds", c.exec_seconds},
             {"noise_sigma", c.noise_sigma},
             {"min_service_slack", c.min_service_slack},
             {"rng_seed", c.rng_seed}};
}

void from_json(const json& j, SimConfig& c) {
    c.work_unit_rate = j.value("work_unit_rate", c.work_unit_rate);
    if (j.contains("op_cost")) {
        const auto& oc = j.at("op_cost");
        c.cost_source = oc.value("source", c.cost_source);
        c.cost_filter = oc.value("filter", c.cost_filter);
        c.cost_aggregation = oc.value("aggregation", c.cost_aggregation);
        c.cost_join = oc.value("join", c.cost_join);
        c.cost_sink = oc.value("sink", c.cost_sink);
    }
    c.bytes_per_field = j.value("bytes_per_field", c.bytes_per_field);
    c.state_safety_factor = j.value("state_safety_factor", c.state_safety_factor);
    c.exec_seconds = j.value("exec_seconds", c.exec_seconds);
    c.noise_sigma = j.value("noise_sigma", c.noise_sigma);
    c.min_service_slack = j.value("min_service_slack", c.min_service_slack);
    c.rng_seed = j.value("rng_seed", c.rng_seed);
}

FlowAnnotation propagate_rates(const JointGraph& g, const SimConfig& cfg, const std::vector<double>& source_scale) {
    const auto& ops = g.query.operators;
    FlowAnnotation fa;
    fa.operators.resize(ops.size());
    for (std::size_t i = 0; i < ops.size(); ++i) {  // operators are stored in topological order
        const auto& op = ops[i];
        const auto& f = op.features;
        auto& fl = fa.operators[i];
        for (auto p : g.predecessors[i]) fl.stream_rates.push_back(fa.operators[p].output_rate);
        switch (op.kind) {
            case OperatorKind::Source: {
                const double scale = source_scale.empty() ? 1.0 : source_scale.at(i);
                fl.output_rate = f.input_event_rate * scale;
                fl.input_rate = fl.output_rate;
                break;
            }
            case OperatorKind::Filter:
            case OperatorKind::WindowedAggregation:
                fl.input_rate = fl.stream_rates.at(0);
                fl.output_rate = f.selectivity * fl.input_rate;
                if (op.kind == OperatorKind::WindowedAggregation) {
                    const auto& w = *f.window;
                    fl.window_seconds = w.policy == WindowPolicy::Time ? w.size
                                        : fl.input_rate > 0.0          ? w.size / fl.input_rate
                                                                       : kInf;
                }
                break;
            case OperatorKind::WindowedJoin: {
                const double l1 = fl.stream_rates.at(0), l2 = fl.stream_rates.at(1);
                const auto& w = *f.window;
                fl.input_rate = l1 + l2;
                if (w.policy == WindowPolicy::Time) {
                    fl.window_seconds = w.size;
                    fl.output_rate = f.selectivity * l1 * l2 * w.size;
                } else {
                    const double hi = std::max(l1, l2);
                    fl.window_seconds = hi > 0.0 ? w.size / hi : kInf;
                    // sel * l1 * l2 * (size / max) without forming 0 * inf
                    fl.output_rate = f.selectivity * w.size * std::min(l1, l2);
                }
                break;
            }
            case OperatorKind::Sink:
                fl.input_rate = fl.stream_rates.at(0);
                fl.output_rate = fl.input_rate;
                break;
        }
    }
    for (const auto& [a, b] : g.dataflow_edges) {
        EdgeFlow e;
        e.from = a;
        e.to = b;
        e.crossing = g.host_of[a] != g.host_of[b];
        e.bytes_per_second = fa.operators[a].output_rate * ops[a].features.tuple_width_out * cfg.bytes_per_field;
        fa.edges.push_back(e);
    }
    return fa;
}

FlowAnnotation capacity_and_latency(const JointGraph& g, FlowAnnotation flows, const SimConfig& cfg) {
    const auto& ops = g.query.operators;
    for (std::size_t i = 0; i < ops.size(); ++i) {
        auto& fl = flows.operators[i];
        const auto& host = g.hardware[g.host_of[i]];
        const double share = host.cpu / static_cast<double>(g.operators_on[g.host_of[i]].size()) / 100.0;
        fl.capacity = share * cfg.work_unit_rate / cfg.op_cost(ops[i].kind);
        fl.saturated = fl.input_rate >= fl.capacity;
        fl.residence_ms = 1000.0 / std::max(fl.capacity - fl.input_rate, cfg.min_service_slack);
        fl.window_delay_ms = is_windowed(ops[i].kind) ? fl.window_seconds / 2.0 * 1000.0 : 0.0;

        fl.state_bytes = 0.0;
        if (is_windowed(ops[i].kind)) {
            const auto& w = *ops[i].features.window;
            const auto& preds = g.predecessors[i];
            for (std::size_t s = 0; s < preds.size(); ++s) {
                const double tuples = w.policy == WindowPolicy::Count ? w.size : w.size * fl.stream_rates[s];
                fl.state_bytes += tuples * ops[preds[s]].features.tuple_width_out * cfg.bytes_per_field;
            }
        }
    }
    for (auto& e : flows.edges) {
        if (!e.crossing) continue;
        const auto& sender = g.hardware[g.host_of[e.from]];
        e.capacity_bytes = sender.net_bandwidth * kBytesPerMegabit;
        e.latency_ms = sender.net_latency;
        e.saturated = e.bytes_per_second > e.capacity_bytes;
    }
    return flows;
}

SimulationTrace trace_simulation(const JointGraph& g, const SimConfig& cfg) {
    cfg.validate();
    const auto& ops = g.query.operators;
    const std::size_t n = ops.size();
    SimulationTrace tr;
    tr.offered = capacity_and_latency(g, propagate_rates(g, cfg), cfg);

    // upstream[i][s]: source s feeds operator i.
    std::vector<std::vector<char>> upstream(n, std::vector<char>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
        if (ops[i].kind == OperatorKind::Source) upstream[i][i] = 1;
        for (auto p : g.predecessors[i])
            for (std::size_t s = 0; s < n; ++s) upstream[i][s] |= upstream[p][s];
    }

    // Each source is throttled by the tightest capacity/load ratio downstream.
    tr.source_throttle.assign(n, 1.0);
    auto tighten = [&](std::size_t at, double ratio) {
        for (std::size_t s = 0; s < n; ++s)
            if (upstream[at][s]) tr.source_throttle[s] = std::min(tr.source_throttle[s], ratio);
    };
    for (std::size_t i = 0; i < n; ++i) {
        const auto& fl = tr.offered.operators[i];
        if (fl.input_rate > 0.0) tighten(i, fl.capacity / fl.input_rate);
    }
    for (const auto& e : tr.offered.edges)
        if (e.crossing && e.bytes_per_second > 0.0) tighten(e.from, e.capacity_bytes / e.bytes_per_second);

    tr.processed = capacity_and_latency(g, propagate_rates(g, cfg, tr.source_throttle), cfg);

    double total_rate = 0.0;
    bool throttled = false;
    for (auto s : g.source_indices()) {
        const double rate = ops[s].features.input_event_rate;
        total_rate += rate;
        tr.backpressure_rate += rate * (1.0 - tr.source_throttle[s]);
        throttled |= tr.source_throttle[s] < 1.0;
    }
    if (!throttled) tr.backpressure_rate = 0.0;

    const std::size_t sink = g.sink_index();
    tr.sink_rate = tr.processed.operators[sink].input_rate;

    std::vector<double> state(g.hardware_count(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
        state[g.host_of[i]] += cfg.state_safety_factor * tr.offered.operators[i].state_bytes;
    for (std::size_t h = 0; h < g.hardware_count(); ++h)
        if (state[h] > g.hardware[h].ram * kBytesPerMegabyte) tr.memory_ok = false;

    // Longest source-to-sink paths for latency and for the first-window fill time.
    std::vector<double> latency(n, 0.0), fill(n, 0.0);
    std::vector<double> edge_latency(n * n, 0.0);
    for (const auto& e : tr.offered.edges) edge_latency[e.from * n + e.to] = e.latency_ms;
    for (std::size_t i = 0; i < n; ++i) {
        double upstream_latency = 0.0, upstream_fill = 0.0;
        for (auto p : g.predecessors[i]) {
            upstream_latency = std::max(upstream_latency, latency[p] + edge_latency[p * n + i]);
            upstream_fill = std::max(upstream_fill, fill[p]);
        }
        const auto& fl = tr.offered.operators[i];
        latency[i] = upstream_latency + fl.residence_ms + fl.window_delay_ms;
        fill[i] = upstream_fill + fl.window_seconds;
    }
    tr.proc_latency_ms = latency[sink];
    tr.fill_seconds = fill[sink];
    tr.output_ok = tr.sink_rate * std::max(0.0, cfg.exec_seconds - tr.fill_seconds) >= 1.0;

    tr.e2e_latency_ms = tr.proc_latency_ms;
    if (tr.backpressure_rate > 0.0 && total_rate > 0.0)
        tr.e2e_latency_ms += 1000.0 * (cfg.exec_seconds / 2.0) * (tr.backpressure_rate / total_rate);
    return tr;
}

CostVector simulate(const JointGraph& g, const SimConfig& cfg) {
    const auto tr = trace_simulation(g, cfg);
    CostVector c;
    c.backpressure = tr.backpressure_rate > 0.0;
    c.success = tr.memory_ok && tr.output_ok;
    if (!c.success) {
        c.throughput = 0.0;
        return c;
    }
    std::mt19937_64 rng(cfg.rng_seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double zt = normal(rng), zp = normal(rng), ze = normal(rng);
    const double s = cfg.noise_sigma;
    c.throughput = tr.sink_rate * std::exp(s * zt);
    c.proc_latency = tr.proc_latency_ms * std::exp(s * zp);
    c.e2e_latency = tr.e2e_latency_ms * std::exp(s * ze);
    return c;
}

}  // namespace streamcost
