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
#include <streamcost/gnn.hpp>
#include <streamcost/graph.hpp>
#include <streamcost/simulator.hpp>

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace streamcost {

/// Inclusive cpu/ram intervals; unset bounds are open. `any` switches the
/// cpu and ram conditions from conjunction to disjunction.
struct HardwareBin {
    std::string name;
    std::optional<double> cpu_min, cpu_max, ram_min, ram_max;
    bool any = false;

    [[nodiscard]] bool matches(const HardwareNode& h) const;
    bool operator==(const HardwareBin&) const = default;
};

struct BinConfig {
    std::vector<HardwareBin> bins = {
        {"small", std::nullopt, 200.0, std::nullopt, 4096.0, false},
        {"medium", 100.0, 500.0, 2048.0, 16384.0, false},
        {"large", 400.0, std::nullopt, 16384.0, std::nullopt, true},
    };

    /// Index of the highest matching bin; hosts matching none rank lowest.
    [[nodiscard]] int rank(const HardwareNode& h) const;
    bool operator==(const BinConfig&) const = default;
};

void to_json(json& j, const BinConfig& b);
void from_json(const json& j, BinConfig& b);

/// Up to k distinct placements that satisfy the three placement rules.
[[nodiscard]] std::vector<Placement> enumerate_candidates(const QueryGraph& q, const std::vector<HardwareNode>& hw,
                                                          std::size_t k, std::mt19937_64& rng,
                                                          const BinConfig& bins = {}, std::size_t attempts = 0);

/// Rule check written independently of the sampler.
struct RuleReport {
    bool complete = true;      // every operator on an existing host
    bool weak_to_strong = true;
    bool no_return = true;     // host-level flow graph is acyclic
    std::vector<std::string> violations;

    [[nodiscard]] bool ok() const { return complete && weak_to_strong && no_return; }
};

[[nodiscard]] RuleReport check_rules(const QueryGraph& q, const std::vector<HardwareNode>& hw, const Placement& p,
                                     const BinConfig& bins = {});

/// Per-metric predictions of all ensemble members and their aggregate:
/// mean of decoded values for regression, strict majority of thresholded
/// probabilities (as 0/1) for binary metrics.
struct PlacementCandidate {
    Placement placement;
    std::map<Metric, std::vector<double>> predictions;
    std::map<Metric, double> aggregate;
};

/// Maps a joint graph to per-metric member predictions.
using Predictor = std::function<std::map<Metric, std::vector<double>>(const JointGraph&)>;

[[nodiscard]] std::map<Metric, double> aggregate_predictions(const std::map<Metric, std::vector<double>>& preds);

[[nodiscard]] PlacementCandidate predict_candidate(const Placement& p, const QueryGraph& q,
                                                   const std::vector<HardwareNode>& hw, const Predictor& predictor);

using Ensembles = std::map<Metric, std::vector<ModelCheckpoint>>;

/// Throws SchemaMismatch when a member predicts another metric, was written
/// for another format, or binary ensembles have even size.
void check_ensembles(const Ensembles& models);
[[nodiscard]] Predictor ensemble_predictor(const Ensembles& models);
[[nodiscard]] PlacementCandidate predict_ensemble(const Placement& p, const QueryGraph& q,
                                                  const std::vector<HardwareNode>& hw, const Ensembles& models);

/// The simulator used as a (perfect) single-member predictor.
[[nodiscard]] Predictor oracle_predictor(const SimConfig& cfg);

enum class Direction { Minimize, Maximize };
[[nodiscard]] Direction default_direction(Metric target);

struct Selection {
    std::optional<std::size_t> chosen;    // index into the candidate list
    bool none_viable = false;
    std::optional<std::size_t> fallback;  // highest predicted success, when none viable
    std::vector<std::string> decisions;   // per candidate: viable / predicted-failure / predicted-backpressure
};

[[nodiscard]] Selection select_placement(const std::vector<PlacementCandidate>& cands, Metric target,
                                         Direction direction);

[[nodiscard]] double speedup(double baseline_cost, double chosen_cost);

}  // namespace streamcost
