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

#include <streamcost/featurize.hpp>
#include <streamcost/graph.hpp>
#include <streamcost/nn.hpp>

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace streamcost {

inline constexpr int kCheckpointVersion = 1;

enum class Scheme { Novel, Traditional };
enum class TaskKind { Regression, Binary };

[[nodiscard]] std::string to_string(Scheme s);
[[nodiscard]] Scheme parse_scheme(const std::string& s);
[[nodiscard]] TaskKind task_for(Metric m);

/// Trainable parameters: one encoder and one update network per node type,
/// plus the graph readout.
struct ModelParams {
    std::array<Mlp, kNodeTypeCount> encoders;
    std::array<Mlp, kNodeTypeCount> updates;
    Mlp readout;

    [[nodiscard]] ModelParams zeros_like() const;
    [[nodiscard]] std::size_t parameter_count() const;
    [[nodiscard]] std::vector<double> flatten() const;
    void assign(std::span<const double> flat);
    [[nodiscard]] bool all_finite() const;

    bool operator==(const ModelParams&) const = default;
};

struct ModelSpec {
    std::size_t hidden_dim = 64;
    Metric metric = Metric::Throughput;
    Scheme scheme = Scheme::Novel;
    Featurization featurization = Featurization::Full;
    std::uint64_t seed = 1;
};

/// A trained (or freshly initialised) cost model for one metric.
struct ModelCheckpoint {
    int format_version = kCheckpointVersion;
    std::size_t hidden_dim = 64;
    Metric metric = Metric::Throughput;
    TaskKind task = TaskKind::Regression;
    Scheme scheme = Scheme::Novel;
    Featurization featurization = Featurization::Full;
    std::uint64_t seed = 1;
    NormalizationStats stats;
    ModelParams params;

    [[nodiscard]] static ModelCheckpoint initialise(const ModelSpec& spec, NormalizationStats stats);
    [[nodiscard]] std::string parameter_hash() const;

    bool operator==(const ModelCheckpoint&) const = default;
};

/// Hidden states of a joint graph: one column per node, operators in
/// canonical order followed by hardware nodes (absent for ops-only models).
struct HiddenStateMap {
    std::vector<std::string> ids;  // "op:<id>" / "hw:<id>"
    Matrix states;                 // hidden_dim x nodes

    [[nodiscard]] Vector at(const std::string& id) const;
};

/// Featurised joint graph in the layout the model consumes.
struct GraphInput {
    std::vector<NodeType> types;                  // per node
    std::vector<Vector> features;                 // per node
    std::vector<std::string> ids;                 // per node
    std::size_t op_count = 0;
    std::vector<std::vector<std::size_t>> preds;  // dataflow predecessors (operators only)
    std::vector<std::size_t> level;               // longest path from a source (operators only)
    std::vector<std::size_t> host;                // node index of the host (operators, when present)
    std::vector<std::vector<std::size_t>> hosted; // operator node indices (hardware nodes)
};

[[nodiscard]] GraphInput compile(const JointGraph& g, const ModelCheckpoint& ckpt);

[[nodiscard]] HiddenStateMap encode_all(const JointGraph& g, const ModelCheckpoint& ckpt);
/// Three-phase typed message passing: operators to hosts, hosts to operators,
/// then along the dataflow in topological order.
[[nodiscard]] HiddenStateMap message_pass(const JointGraph& g, const HiddenStateMap& states,
                                          const ModelCheckpoint& ckpt);
/// Three synchronous rounds over the union of all edge sets, every node updated.
[[nodiscard]] HiddenStateMap forward_traditional(const JointGraph& g, const HiddenStateMap& states,
                                                 const ModelCheckpoint& ckpt);
/// Decoded prediction: expm1 of the log-space output (regression) or the
/// logistic of the logit (binary).
[[nodiscard]] double readout(const JointGraph& g, const HiddenStateMap& states, const ModelCheckpoint& ckpt);

/// Raw network output (log1p-space value or logit), using the checkpoint's scheme.
[[nodiscard]] double raw_output(const GraphInput& input, const ModelCheckpoint& ckpt);
[[nodiscard]] double predict(const JointGraph& g, const ModelCheckpoint& ckpt);
[[nodiscard]] double decode(TaskKind task, double raw);

/// Loss on the raw output: squared log1p error for regression, binary
/// cross-entropy for classification.
[[nodiscard]] double example_loss(TaskKind task, double target, double raw);
[[nodiscard]] double example_loss_gradient(TaskKind task, double target, double raw);

/// Mean loss over a batch and its exact gradient with respect to every parameter.
/// Optional per-example weights scale each term; empty means weight 1.
struct BatchResult {
    double loss = 0.0;
    std::vector<double> raw;
};

[[nodiscard]] BatchResult batch_loss_and_gradient(const ModelCheckpoint& ckpt,
                                                  std::span<const GraphInput* const> inputs,
                                                  std::span<const double> targets, ModelParams* grads,
                                                  std::span<const double> weights = {});

[[nodiscard]] std::vector<double> batch_raw_outputs(const ModelCheckpoint& ckpt,
                                                    std::span<const GraphInput* const> inputs);

}  // namespace streamcost
