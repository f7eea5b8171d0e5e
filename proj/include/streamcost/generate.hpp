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
#include <streamcost/optimize.hpp>
#include <streamcost/simulator.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace streamcost {

enum class Family { Linear, TwoWay, ThreeWay };
[[nodiscard]] std::string to_string(Family f);
[[nodiscard]] Family parse_family(const std::string& s);

enum class HardwareDim { Cpu, Ram, Bandwidth, Latency };
inline constexpr std::array<HardwareDim, 4> kHardwareDims = {HardwareDim::Cpu, HardwareDim::Ram,
                                                             HardwareDim::Bandwidth, HardwareDim::Latency};
[[nodiscard]] std::string to_string(HardwareDim d);

/// Value lists the hardware features are drawn from (ram in MB).
struct HardwareRanges {
    std::vector<double> cpu = {50, 100, 200, 300, 400, 500, 600, 700, 800};
    std::vector<double> ram = {1000, 2000, 4000, 8000, 16000, 24000, 32000};
    std::vector<double> bandwidth = {25, 50, 100, 200, 400, 800, 1600, 3200, 6400, 10000};
    std::vector<double> latency = {1, 2, 5, 10, 20, 40, 80, 160};

    [[nodiscard]] std::vector<double>& list(HardwareDim d);
    [[nodiscard]] const std::vector<double>& list(HardwareDim d) const;
};

struct GenConfig {
    std::array<double, 3> family_mix = {0.35, 0.34, 0.31};
    std::vector<double> rate_linear = {100, 200, 400, 800, 1600, 3200, 6400, 12800, 25600};
    std::vector<double> rate_two_way = {50, 100, 250, 500, 750, 1000, 1250, 1500, 1750, 2000};
    std::vector<double> rate_three_way = {20, 50, 100, 200, 300, 400, 500, 600, 700, 800, 900, 1000};
    int width_min = 3;
    int width_max = 10;
    std::vector<double> window_count = {5, 10, 20, 40, 80, 160, 320, 640};
    std::vector<double> window_time = {0.25, 0.5, 1, 2, 4, 8, 16};
    double slide_min = 0.3;
    double slide_max = 0.7;
    std::array<double, 4> filter_count_mix = {0.35, 0.34, 0.24, 0.06};  // weights for 1..4 filters, normalised when sampling
    double agg_probability = 0.5;
    double selectivity_min = 0.0;
    double selectivity_max = 1.0;
    /// Join selectivities: uniform on [selectivity_min, selectivity_max], or
    /// log-uniform on [join_selectivity_min, selectivity_max] when enabled.
    bool join_selectivity_log_uniform = false;
    double join_selectivity_min = 1e-4;
    HardwareRanges hardware;
    std::optional<std::size_t> hosts_per_query;  // default: one host per operator
    BinConfig bins;
    SimConfig sim;
    std::uint64_t seed = 1;
    double train_fraction = 0.8;
    double validation_fraction = 0.1;
    /// Names of the override blocks applied to the defaults (recorded for provenance).
    std::vector<std::string> overrides;

    void validate() const;
};

void to_json(json& j, const GenConfig& c);
/// Missing keys keep their defaults.
void from_json(const json& j, GenConfig& c);
[[nodiscard]] std::string config_hash(const GenConfig& c);

/// Named range overrides:
///   interpolation                          unseen in-range hardware values
///   <strong|weak>-<dim>-<train|eval>       reduced training / held-back evaluation ranges
[[nodiscard]] GenConfig with_override(GenConfig c, const std::string& block);
[[nodiscard]] std::vector<std::string> override_names();

/// Independent RNG for item `index` of a run seeded with `seed`.
[[nodiscard]] std::mt19937_64 item_rng(std::uint64_t seed, std::uint64_t index);

[[nodiscard]] Family sample_family(const GenConfig& cfg, std::mt19937_64& rng);

/// Optional structural choices; unset ones are sampled.
struct TemplateChoice {
    std::optional<std::size_t> filters;
    std::optional<bool> aggregation;
};

[[nodiscard]] QueryGraph sample_query(const GenConfig& cfg, std::mt19937_64& rng, Family family,
                                      const TemplateChoice& choice = {});
[[nodiscard]] QueryGraph sample_query(const GenConfig& cfg, std::mt19937_64& rng);
/// Linear query whose filter stage is a series of k filters.
[[nodiscard]] QueryGraph sample_filter_chain(const GenConfig& cfg, std::size_t k, std::mt19937_64& rng);
[[nodiscard]] std::vector<HardwareNode> sample_hardware(const GenConfig& cfg, std::mt19937_64& rng,
                                                        std::size_t count);

/// What kind of queries a dataset contains.
struct DatasetSpec {
    std::size_t count = 1000;
    std::optional<Family> family;          // fixed family instead of the mix
    std::optional<std::size_t> chain_length;  // filter chains of this length instead
    bool split = true;                     // 80/10/10 by query; otherwise all Split::Extra
    bool label = true;
};

struct Dataset {
    std::vector<Example> examples;
    json manifest;
};

/// One random rule-satisfying placement per query, labelled by the simulator.
[[nodiscard]] Dataset make_dataset(const GenConfig& cfg, const DatasetSpec& spec);

/// Random subsample of the majority class down to the minority-class size,
/// keeping the original order. Examples without a defined value are dropped.
[[nodiscard]] std::vector<Example> balanced_subset(const std::vector<Example>& examples, Metric m,
                                                   std::uint64_t seed);

}  // namespace streamcost
