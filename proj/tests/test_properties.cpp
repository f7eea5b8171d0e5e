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
#include "invariants.hpp"
#include "rule_oracle.hpp"

#include <streamcost/evaluate.hpp>
#include <streamcost/featurize.hpp>
#include <streamcost/simulator.hpp>

#include <doctest.h>

#include <random>

using namespace streamcost;
using namespace fixtures;

namespace {

ModelCheckpoint model(Scheme s, Featurization f, Metric m = Metric::Throughput) {
    std::vector<JointGraph> gs;
    for (std::uint64_t i = 0; i < 30; ++i) gs.push_back(random_instance(500 + i).graph);
    ModelSpec spec;
    spec.hidden_dim = 16;
    spec.scheme = s;
    spec.featurization = f;
    spec.metric = m;
    spec.seed = 9;
    return ModelCheckpoint::initialise(spec, fit_stats(gs));
}

}  // namespace

TEST_CASE("predictions do not depend on input order") {
    std::mt19937_64 rng(1);
    for (auto s : {Scheme::Novel, Scheme::Traditional})
        for (auto f : {Featurization::Full, Featurization::NoHardware, Featurization::OpsOnly}) {
            const auto m = model(s, f);
            for (std::uint64_t i = 0; i < 20; ++i) CHECK(invariants::permutation_gap(random_instance(i), m, rng) < 1e-12);
        }
}

TEST_CASE("hardware features only enter through the hardware update") {
    std::mt19937_64 rng(2);
    const auto m = model(Scheme::Novel, Featurization::Full);
    for (std::uint64_t i = 0; i < 30; ++i) CHECK(invariants::hardware_leak(random_instance(i), m, rng) == 0.0);
    // Without zeroing, hardware features do matter.
    const auto in = random_instance(3);
    auto hw = in.hardware;
    for (auto& h : hw) h.cpu *= 1.7;
    CHECK(predict(build_joint_graph(in.query, hw, in.placement), m) != predict(in.graph, m));
}

TEST_CASE("models blind to hardware ignore hardware features") {
    for (auto f : {Featurization::NoHardware, Featurization::OpsOnly}) {
        const auto m = model(Scheme::Novel, f);
        for (std::uint64_t i = 0; i < 10; ++i) {
            const auto in = random_instance(i);
            auto hw = in.hardware;
            for (auto& h : hw) h.ram *= 3;
            CHECK(predict(build_joint_graph(in.query, hw, in.placement), m) == predict(in.graph, m));
        }
    }
}

TEST_CASE("q-error is symmetric and at least one") {
    std::mt19937_64 rng(3);
    std::lognormal_distribution<double> d(0, 3);
    for (int i = 0; i < 1000; ++i) {
        const double a = d(rng), b = d(rng);
        CHECK(q_error(a, b) == q_error(b, a));
        CHECK(q_error(a, b) >= 1.0);
    }
}

TEST_CASE("selectivities stay in [0, 1]") {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<std::uint64_t> u(0, 1000);
    for (int i = 0; i < 1000; ++i) {
        const auto a = u(rng), b = u(rng) + 1, c = u(rng) + 1;
        for (double s : {filter_selectivity(a, b), join_selectivity(a, b, c), agg_selectivity(a % b + 1, b)}) {
            CHECK(s >= 0.0);
            CHECK(s <= 1.0);
        }
    }
}

TEST_CASE("generated placements satisfy the rules") {
    for (std::uint64_t i = 0; i < 300; ++i) {
        const auto in = random_instance(i);
        CHECK(rule_oracle::valid(in.query, in.hardware, in.placement));
    }
}

TEST_CASE("simulator labels are consistent") {
    for (std::uint64_t i = 0; i < 200; ++i) {
        const auto in = random_instance(i);
        SimConfig cfg;
        cfg.rng_seed = i;
        const auto c = simulate(in.graph, cfg);
        CHECK(c.throughput >= 0.0);
        CHECK(c.proc_latency.has_value() == c.success);
        CHECK(c.e2e_latency.has_value() == c.success);
        if (c.success) {
            CHECK(*c.proc_latency > 0.0);
            CHECK(*c.e2e_latency > 0.0);
        }
        CHECK(simulate(in.graph, cfg) == c);
    }
}
