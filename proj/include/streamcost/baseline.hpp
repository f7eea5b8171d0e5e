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
#include <streamcost/nn.hpp>
#include <streamcost/train.hpp>

#include <array>
#include <string>
#include <vector>

namespace streamcost {

inline constexpr int kFlatVectorVersion = 1;

/// Slot names of the flat representation, in order.
[[nodiscard]] const std::vector<std::string>& flat_slots();

/// Aggregate query and used-host statistics; operator-to-host structure is
/// deliberately not represented.
[[nodiscard]] Vector flatten(const JointGraph& g);

struct FlatModel {
    int format_version = kFlatVectorVersion;
    Metric metric = Metric::Throughput;
    TaskKind task = TaskKind::Regression;
    std::uint64_t seed = 1;
    Vector mean;   // per slot
    Vector scale;  // per slot, standard deviation floored
    Mlp network;

    [[nodiscard]] Vector standardise(const Vector& x) const;
    bool operator==(const FlatModel&) const = default;
};

[[nodiscard]] double predict(const JointGraph& g, const FlatModel& m);

struct FlatTrainResult {
    FlatModel model;
    std::vector<EpochLog> log;
    std::size_t best_epoch = 0;
    double best_val_loss = 0.0;
};

/// Fully connected network (flat -> hidden -> hidden -> 1) trained with the
/// same losses, optimiser, clipping and early stopping as the graph model.
[[nodiscard]] FlatTrainResult train_flat(const TrainConfig& cfg, const std::vector<Example>& train,
                                         const std::vector<Example>& validation, std::uint64_t seed);
[[nodiscard]] std::vector<FlatTrainResult> train_flat_ensemble(const TrainConfig& cfg,
                                                               const std::vector<Example>& train,
                                                               const std::vector<Example>& validation);

[[nodiscard]] json flat_to_json(const FlatModel& m);
[[nodiscard]] FlatModel flat_from_json(const json& j);

}  // namespace streamcost
