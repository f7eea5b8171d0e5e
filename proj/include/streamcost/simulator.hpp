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

#include <cstdint>
#include <vector>

namespace streamcost {

/// Analytic execution model standing in for a real stream processor.
struct SimConfig {
    double work_unit_rate = 10000.0;  // work units/s of one reference core (100 % cpu)
    double cost_source = 0.2;         // work units per tuple, per operator kind
    double cost_filter = 0.5;
    double cost_aggregation = 2.0;
    double cost_join = 4.0;
    double cost_sink = 0.2;
    double bytes_per_field = 8.0;
    double state_safety_factor = 4.0;
    double exec_seconds = 240.0;
    double noise_sigma = 0.1;
    /// Lower bound on the service slack (mu - lambda) in tuples/s; bounds the
    /// residence time of saturated operators.
    double min_service_slack = 1.0;
    std::uint64_t rng_seed = 0;

    [[nodiscard]] double op_cost(OperatorKind k) const;
    void validate() const;
    bool operator==(const SimConfig&) const = default;
};

void to_json(json& j, const SimConfig& c);
/// Missing keys keep their defaults.
void from_json(const json& j, SimConfig& c);

struct OperatorFlow {
    double input_rate = 0.0;             // total arrival rate (tuples/s)
    std::vector<double> stream_rates;    // per input stream, in predecessor order
    double output_rate = 0.0;
    double capacity = 0.0;               // mu, tuples/s
    double residence_ms = 0.0;
    double window_seconds = 0.0;         // 0 for non-windowed operators
    double window_delay_ms = 0.0;
    double state_bytes = 0.0;            // before the safety factor
    bool saturated = false;              // offered load >= capacity
};

struct EdgeFlow {
    std::size_t from = 0;
    std::size_t to = 0;
    bool crossing = false;         // endpoints on different hosts
    double bytes_per_second = 0.0;
    double capacity_bytes = 0.0;   // sender bandwidth in bytes/s (crossing edges only)
    double latency_ms = 0.0;       // sender latency (crossing edges only)
    bool saturated = false;
};

/// Per-operator and per-edge rates, capacities and delays, indexed like the
/// joint graph's operators and dataflow edges.
struct FlowAnnotation {
    std::vector<OperatorFlow> operators;
    std::vector<EdgeFlow> edges;
};

/// Offered rates when every source emits `source_scale[i] * input_event_rate`
/// (scale 1 when empty), in topological order.
[[nodiscard]] FlowAnnotation propagate_rates(const JointGraph& g, const SimConfig& cfg,
                                             const std::vector<double>& source_scale = {});

/// Adds capacities, residence times, window delays, state sizes and network
/// terms to an annotation produced by propagate_rates.
[[nodiscard]] FlowAnnotation capacity_and_latency(const JointGraph& g, FlowAnnotation flows, const SimConfig& cfg);

/// Intermediate quantities of one simulation, exposed for inspection and tests.
struct SimulationTrace {
    FlowAnnotation offered;              // unthrottled
    FlowAnnotation processed;            // sources throttled by their bottleneck
    std::vector<double> source_throttle; // per operator index; 1 for non-sources
    double backpressure_rate = 0.0;      // R, tuples/s
    double sink_rate = 0.0;              // noise-free throughput
    double proc_latency_ms = 0.0;        // noise-free L_p
    double e2e_latency_ms = 0.0;         // noise-free L_e
    double fill_seconds = 0.0;           // time until the first window completes
    bool memory_ok = true;
    bool output_ok = true;
};

[[nodiscard]] SimulationTrace trace_simulation(const JointGraph& g, const SimConfig& cfg);

[[nodiscard]] CostVector simulate(const JointGraph& g, const SimConfig& cfg);

}  // namespace streamcost
