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
#include <streamcost/evaluate.hpp>
#include <streamcost/generate.hpp>
#include <streamcost/optimize.hpp>
#include <streamcost/train.hpp>

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace streamcost {

struct ExperimentConfig {
    GenConfig gen;
    TrainConfig train;
    std::size_t corpus_size = 5000;
    std::size_t eval_size = 100;  // interpolation / extrapolation evaluation queries
    std::size_t extrapolation_corpus_size = 5000;
    std::size_t extrapolation_epochs = 200;
    std::vector<std::uint64_t> extrapolation_seeds = {1};
    std::vector<std::uint64_t> ablation_seeds = {1};
    std::size_t chain_eval_size = 200;  // per chain length
    std::size_t fine_tune_size = 3000;
    std::size_t fine_tune_epochs = 100;
    std::size_t placement_queries = 50;  // per family
    std::size_t placement_k = 50;
    std::uint64_t eval_seed = 1001;  // base seed of evaluation-only corpora

    void validate() const;
};

void to_json(json& j, const ExperimentConfig& c);
void from_json(const json& j, ExperimentConfig& c);
[[nodiscard]] std::string config_hash(const ExperimentConfig& c);

using Progress = std::function<void(const std::string&)>;

/// Corpus plus per-metric ensembles of the graph model and the flat baseline.
struct StandardModels {
    Dataset corpus;
    std::map<Metric, std::vector<ModelCheckpoint>> gnn;
    std::map<Metric, std::vector<FlatModel>> flat;
    std::map<Metric, std::vector<TrainResult>> gnn_runs;
};

[[nodiscard]] StandardModels train_standard(const ExperimentConfig& cfg, const std::vector<Metric>& metrics,
                                            bool with_flat, const Progress& progress = {});

/// Writes `gnn_<tag>_seed<k>.json` and `flat_<tag>_seed<k>.json` per member.
void save_models(const std::filesystem::path& dir, const StandardModels& m);

/// Reads every model file of a directory; members are ordered by seed. The
/// corpus is left empty.
[[nodiscard]] StandardModels read_model_dir(const std::filesystem::path& dir);

/// `read_model_dir` plus the standard corpus regenerated from the config.
[[nodiscard]] StandardModels load_standard(const ExperimentConfig& cfg, const std::filesystem::path& dir);

[[nodiscard]] std::map<Metric, BatchPredictor> gnn_predictors(const StandardModels& m);
[[nodiscard]] std::map<Metric, BatchPredictor> flat_predictors(const StandardModels& m);
[[nodiscard]] std::vector<std::string> model_hashes(const StandardModels& m);

/// Held-out test report of the standard ensembles.
[[nodiscard]] EvalReport standard_report(const ExperimentConfig& cfg, const StandardModels& m, bool flat);

/// Evaluation-only corpus (no split) with an optional override block or chain length.
[[nodiscard]] std::vector<Example> evaluation_corpus(const ExperimentConfig& cfg, std::size_t count,
                                                     std::uint64_t seed_offset, const std::string& override_block = {},
                                                     std::optional<std::size_t> chain_length = std::nullopt,
                                                     std::optional<Family> family = std::nullopt);

/// Interpolation: standard models on unseen in-range hardware values.
[[nodiscard]] json run_interpolation(const ExperimentConfig& cfg, const StandardModels& m);

/// Extrapolation: per dimension and direction, retrain on the reduced range and
/// evaluate on the held-back values.
[[nodiscard]] json run_extrapolation(const ExperimentConfig& cfg, const StandardModels& m,
                                     const Progress& progress = {});

/// Graph model versus flat baseline on the test split and on unseen filter chains.
[[nodiscard]] json run_patterns(const ExperimentConfig& cfg, const StandardModels& m);

/// Featurization (full / no-hardware / ops-only) and message-passing
/// (novel / traditional) ablations on the standard corpus.
[[nodiscard]] json run_ablations(const ExperimentConfig& cfg, const StandardModels& m, const Progress& progress = {});

/// Fine-tunes the first throughput model on filter chains.
[[nodiscard]] json run_fine_tune(const ExperimentConfig& cfg, const StandardModels& m, const Progress& progress = {});

/// Random heuristic placement versus ensemble-selected placement, measured by
/// the simulator, per family; also for the flat baseline and the oracle.
[[nodiscard]] json run_placement_study(const ExperimentConfig& cfg, const StandardModels& m, Metric target,
                                       const Progress& progress = {});

}  // namespace streamcost
