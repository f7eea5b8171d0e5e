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

#include "fixtures.hpp"

#include <streamcost/baseline.hpp>
#include <streamcost/error.hpp>
#include <streamcost/generate.hpp>

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace streamcost;
using namespace fixtures;

namespace {

double slot(const Vector& v, const std::string& name) {
    const auto& s = flat_slots();
    const auto it = std::find(s.begin(), s.end(), name);
    REQUIRE(it != s.end());
    return v[it - s.begin()];
}

std::vector<Example> corpus(std::uint64_t seed, std::size_t n) {
    GenConfig cfg;
    cfg.seed = seed;
    DatasetSpec spec;
    spec.count = n;
    return make_dataset(cfg, spec).examples;
}

}  // namespace

TEST_CASE("flat vector of a hand-built graph") {
    const auto q = two_way(100, 300, 0.01, time_window(2));
    const std::vector<HardwareNode> hw = {host("x", 200, 4000, 100, 5), host("y", 400, 8000, 1000, 10)};
    Placement p;
    p.assignment = {{"a", "x"}, {"b", "x"}, {"j", "y"}, {"k", "y"}};
    const auto v = flatten(build_joint_graph(q, hw, p));
    CHECK(v.size() == static_cast<Eigen::Index>(flat_slots().size()));
    CHECK(slot(v, "n_sources") == 2);
    CHECK(slot(v, "n_joins") == 1);
    CHECK(slot(v, "n_filters") == 0);
    CHECK(slot(v, "n_operators") == 4);
    CHECK(slot(v, "selectivity_mean") == 0.01);
    CHECK(slot(v, "window_size_max") == doctest::Approx(std::log1p(2.0)));
    CHECK(slot(v, "total_event_rate") == doctest::Approx(std::log1p(400.0)));
    CHECK(slot(v, "mean_tuple_width") == doctest::Approx((4 + 4 + 8 + 8) / 4.0));
    CHECK(slot(v, "cpu_min") == 200);
    CHECK(slot(v, "cpu_mean") == 300);
    CHECK(slot(v, "ram_max") == doctest::Approx(std::log1p(8000.0)));
    CHECK(slot(v, "latency_min") == doctest::Approx(std::log1p(5.0)));
    CHECK(slot(v, "used_hosts") == 2);
    CHECK(slot(v, "max_colocation") == 2);
}

TEST_CASE("flat vector ignores which operator sits on which host") {
    const auto q = two_way();
    const std::vector<HardwareNode> hw = {host("x", 300, 8000), host("y", 300, 8000)};
    Placement p1, p2;
    p1.assignment = {{"a", "x"}, {"j", "x"}, {"b", "y"}, {"k", "y"}};
    p2.assignment = {{"b", "x"}, {"j", "x"}, {"a", "y"}, {"k", "y"}};
    CHECK(flatten(build_joint_graph(q, hw, p1)) == flatten(build_joint_graph(q, hw, p2)));
}

TEST_CASE("flat vector is invariant to operator and host order") {
    for (std::uint64_t s = 0; s < 30; ++s) {
        const auto in = random_instance(s);
        auto q = in.query;
        auto hw = in.hardware;
        std::reverse(q.operators.begin(), q.operators.end());
        std::reverse(q.edges.begin(), q.edges.end());
        std::reverse(hw.begin(), hw.end());
        CHECK(flatten(build_joint_graph(q, hw, in.placement)) == flatten(in.graph));
    }
}

TEST_CASE("the flat model memorises a tiny set and is deterministic") {
    const auto data = corpus(12, 40);
    std::vector<Example> few;
    for (const auto& e : data)
        if (e.label && e.label->success && few.size() < 4) few.push_back(e);
    TrainConfig cfg;
    cfg.metric = Metric::Throughput;
    cfg.epochs = 600;
    cfg.hidden_dim = 16;
    cfg.learning_rate = 1e-2;
    cfg.patience = 1000;
    cfg.seeds = {1};
    const auto r = train_flat(cfg, few, few, 1);
    CHECK(r.best_val_loss < 1e-3);
    for (const auto& e : few) {
        const double y = e.label->throughput;
        CHECK(std::abs(std::log1p(predict(e.graph, r.model)) - std::log1p(y)) < 0.1);
    }
    const auto again = train_flat(cfg, few, few, 1);
    CHECK(again.model == r.model);
    const auto other = train_flat(cfg, few, few, 2);
    CHECK_FALSE(other.model == r.model);
}

TEST_CASE("flat classification outputs probabilities") {
    const auto data = corpus(13, 80);
    TrainConfig cfg;
    cfg.metric = Metric::Success;
    cfg.epochs = 3;
    cfg.hidden_dim = 8;
    cfg.seeds = {1, 2, 3};
    const auto ens = train_flat_ensemble(cfg, filter_split(data, Split::Train), filter_split(data, Split::Validation));
    REQUIRE(ens.size() == 3);
    for (const auto& r : ens) {
        CHECK(r.model.task == TaskKind::Binary);
        for (const auto& e : data) {
            const double p = predict(e.graph, r.model);
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
        }
    }
}

TEST_CASE("flat model JSON round trip and rejection") {
    const auto data = corpus(14, 40);
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.hidden_dim = 4;
    const auto m = train_flat(cfg, filter_split(data, Split::Train), filter_split(data, Split::Validation), 3).model;
    const auto j = flat_to_json(m);
    CHECK(flat_from_json(j) == m);
    CHECK(j.at("model") == "flat");
    auto bad = j;
    bad["slots"].erase(0);
    CHECK_THROWS_AS((void)flat_from_json(bad), Error);
    CHECK_THROWS_AS((void)m.standardise(Vector::Zero(3)), Error);
    CHECK_THROWS_AS((void)train_flat(cfg, {}, {}, 1), Error);
}
