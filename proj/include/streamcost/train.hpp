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

#include <cstdint>
#include <string>
#include <vector>

namespace streamcost {

struct TrainConfig {
    Metric metric = Metric::Throughput;
    std::size_t epochs = 200;
    std::size_t batch_size = 32;
    double learning_rate = 1e-3;
    double clip_norm = 5.0;
    std::size_t patience = 20;
    std::vector<std::uint64_t> seeds = {1, 2, 3};
    std::size_t hidden_dim = 64;
    Scheme scheme = Scheme::Novel;
    Featurization featurization = Featurization::Full;
    /// Fine-tuning runs at learning_rate * this factor.
    double fine_tune_lr_factor = 0.1;
    /// Weight binary classes inversely to their frequency so that a rare
    /// class counts as much as a common one.
    bool balance_classes = true;

    void validate() const;
};

void to_json(json& j, const TrainConfig& c);
/// Missing keys keep their defaults.
void from_json(const json& j, TrainConfig& c);

struct EpochLog {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
};

struct TrainResult {
    ModelCheckpoint model;  // lowest validation loss
    std::vector<EpochLog> log;
    std::size_t best_epoch = 0;
    double best_val_loss = 0.0;
    /// Validation loss of the starting weights (epoch 0).
    double initial_val_loss = 0.0;

    [[nodiscard]] std::string log_csv() const;
};

/// Examples usable for a metric: labelled, and for regression metrics only
/// successful executions (latencies are undefined otherwise).
[[nodiscard]] std::vector<const Example*> usable_examples(const std::vector<Example>& examples, Metric m);
[[nodiscard]] double training_target(const Example& e, Metric m);

/// Per-example loss weights: n / (2 n_c) for binary targets of class c when
/// both classes occur, otherwise 1.
[[nodiscard]] std::vector<double> class_weights(TaskKind task, const std::vector<double>& targets, bool balance);

/// Mean per-example loss of a model on examples, class-weighted when `balance` is set.
[[nodiscard]] double mean_loss(const ModelCheckpoint& model, const std::vector<Example>& examples,
                               bool balance = false);

/// Trains one model with the given seed. Statistics are fitted on the
/// training examples; validation examples only drive model selection.
[[nodiscard]] TrainResult train_model(const TrainConfig& cfg, const std::vector<Example>& train,
                                      const std::vector<Example>& validation, std::uint64_t seed);

/// One model per configured seed, all on identical data.
[[nodiscard]] std::vector<TrainResult> train_ensemble(const TrainConfig& cfg, const std::vector<Example>& train,
                                                      const std::vector<Example>& validation);

/// Continues training `base` at a reduced learning rate with its statistics
/// frozen. `cfg.epochs == 0` returns the base model unchanged.
[[nodiscard]] TrainResult fine_tune(const ModelCheckpoint& base, const std::vector<Example>& extra,
                                    const std::vector<Example>& validation, const TrainConfig& cfg);

}  // namespace streamcost
