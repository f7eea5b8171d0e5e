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

#include <streamcost/baseline.hpp>
#include <streamcost/dataset.hpp>
#include <streamcost/gnn.hpp>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace streamcost {

/// max(c / c_hat, c_hat / c); both arguments must be positive.
[[nodiscard]] double q_error(double c, double c_hat);

/// Smallest value accepted as a regression prediction when computing q-errors.
inline constexpr double kMinPrediction = 1e-6;

/// Decoded predictions for a batch of graphs (probabilities or 0/1 votes for
/// binary metrics).
using BatchPredictor = std::function<std::vector<double>(const std::vector<const JointGraph*>&)>;

/// Mean of member predictions (regression) or strict majority of thresholded
/// member outputs (binary).
[[nodiscard]] BatchPredictor gnn_predictor(std::vector<ModelCheckpoint> members);
[[nodiscard]] BatchPredictor flat_predictor(std::vector<FlatModel> members);

struct Cell {
    std::size_t n = 0;
    std::optional<double> q50, q95;  // regression
    std::optional<double> accuracy;  // binary
    bool operator==(const Cell&) const = default;
};

struct MetricEval {
    Cell overall;
    /// grouping ("family", "cpu", "ram", "bandwidth", "latency") -> bucket -> cell
    std::map<std::string, std::map<std::string, Cell>> groups;
};

struct EvalReport {
    std::string experiment;
    std::string config_hash;
    std::vector<std::string> model_hashes;
    std::map<Metric, MetricEval> metrics;
    std::vector<std::string> notes;

    [[nodiscard]] json to_json() const;
};

/// Cell from q-errors (regression) or correctness flags (binary).
[[nodiscard]] Cell regression_cell(std::vector<double> q_errors);
[[nodiscard]] Cell accuracy_cell(const std::vector<bool>& correct);

/// Bucket label of a graph's mean host value for a grouping.
[[nodiscard]] std::string bucket_of(const JointGraph& g, const std::string& grouping);
[[nodiscard]] const std::vector<std::string>& groupings();

struct EvalOptions {
    std::string experiment = "evaluation";
    std::string config_hash;
    std::vector<std::string> model_hashes;
    std::uint64_t balance_seed = 7;
    bool balance = true;
};

/// Overall and grouped Q50/Q95 (regression) and accuracy on a label-balanced
/// subset (binary). Failed executions are excluded from regression pools.
[[nodiscard]] EvalReport evaluate_models(const std::map<Metric, BatchPredictor>& predictors,
                                         const std::vector<Example>& examples, const EvalOptions& opts);

/// Overall cell of one metric.
[[nodiscard]] Cell evaluate_metric(const BatchPredictor& predictor, Metric m, const std::vector<Example>& examples,
                                   const EvalOptions& opts);

}  // namespace streamcost
