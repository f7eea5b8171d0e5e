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
#include "rule_oracle.hpp"

#include <streamcost/error.hpp>
#include <streamcost/optimize.hpp>

#include <doctest.h>

#include <set>

using namespace streamcost;
using namespace fixtures;

namespace {

HardwareNode small_host(const std::string& id) { return host(id, 50, 1000); }
HardwareNode medium_host(const std::string& id) { return host(id, 300, 8000); }
HardwareNode large_host(const std::string& id) { return host(id, 800, 32000); }

PlacementCandidate candidate(double target, double success, double bp, Metric m = Metric::ProcLatency) {
    PlacementCandidate c;
    c.predictions[m] = {target};
    c.predictions[Metric::Success] = {success};
    c.predictions[Metric::Backpressure] = {bp};
    c.aggregate = aggregate_predictions(c.predictions);
    return c;
}

}  // namespace

TEST_CASE("bins rank hosts") {
    const BinConfig bins;
    CHECK(bins.rank(small_host("a")) == 0);
    CHECK(bins.rank(medium_host("a")) == 1);
    CHECK(bins.rank(large_host("a")) == 2);
    CHECK(bins.rank(host("a", 800, 1000)) == 2);   // cpu alone qualifies as large
    CHECK(bins.rank(host("a", 50, 20000)) == 2);   // ram alone qualifies as large
    CHECK(bins.rank(host("a", 600, 3000)) == 2);
    CHECK(bins.rank(host("a", 50, 8000)) == 0);    // matches no bin
    for (std::uint64_t s = 0; s < 200; ++s)
        for (const auto& h : random_instance(s).hardware) CHECK(bins.rank(h) == rule_oracle::rank(h));
}

TEST_CASE("a single host yields exactly one candidate") {
    const auto q = two_way();
    auto rng = item_rng(1, 0);
    const auto c = enumerate_candidates(q, {medium_host("h")}, 10, rng);
    REQUIRE(c.size() == 1);
    CHECK(c.front() == place_all(q, "h"));
}

TEST_CASE("weak-to-strong violations are rejected") {
    const auto q = chain();
    const std::vector<HardwareNode> hw = {large_host("big"), small_host("tiny")};
    Placement p = place_all(q, "big");
    p.assignment["k"] = "tiny";
    const auto r = check_rules(q, hw, p);
    CHECK_FALSE(r.weak_to_strong);
    CHECK_FALSE(r.ok());
    CHECK_FALSE(rule_oracle::valid(q, hw, p));
    p.assignment = {{"s", "tiny"}, {"f", "tiny"}, {"k", "big"}};
    CHECK(check_rules(q, hw, p).ok());
}

TEST_CASE("returning to a host is rejected") {
    const auto q = chain();
    const std::vector<HardwareNode> hw = {medium_host("a"), medium_host("b")};
    Placement p;
    p.assignment = {{"s", "a"}, {"f", "b"}, {"k", "a"}};
    const auto r = check_rules(q, hw, p);
    CHECK(r.weak_to_strong);
    CHECK_FALSE(r.no_return);
    CHECK_FALSE(rule_oracle::valid(q, hw, p));
}

TEST_CASE("data flowing back through a join is rejected") {
    // Two streams cross between hosts in opposite directions.
    const auto q = two_way();
    const std::vector<HardwareNode> hw = {medium_host("x"), medium_host("y"), medium_host("z")};
    Placement p;
    p.assignment = {{"a", "x"}, {"b", "z"}, {"j", "y"}, {"k", "x"}};
    CHECK_FALSE(check_rules(q, hw, p).no_return);
    CHECK_FALSE(rule_oracle::valid(q, hw, p));
}

TEST_CASE("incomplete placements are reported") {
    const auto q = chain();
    Placement p = place_all(q, "h");
    p.assignment.erase("f");
    CHECK_FALSE(check_rules(q, {medium_host("h")}, p).complete);
    p = place_all(q, "nowhere");
    CHECK_FALSE(check_rules(q, {medium_host("h")}, p).complete);
}

TEST_CASE("enumeration finds every valid placement of a small instance") {
    const auto q = two_way();
    const std::vector<HardwareNode> hw = {small_host("h0"), medium_host("h1"), medium_host("h2"), large_host("h3")};
    const auto expected = rule_oracle::all_valid(q, hw);
    auto rng = item_rng(2, 0);
    const auto got = enumerate_candidates(q, hw, 1000, rng, {}, 20000);
    std::set<std::map<std::string, std::string>> a, b;
    for (const auto& p : expected) a.insert(p.assignment);
    for (const auto& p : got) b.insert(p.assignment);
    CHECK(b.size() == got.size());
    CHECK(a == b);
}

TEST_CASE("enumerated candidates satisfy the rules and are distinct") {
    const GenConfig cfg;
    for (std::uint64_t s = 0; s < 60; ++s) {
        auto rng = item_rng(s, 1);
        const auto q = sample_query(cfg, rng);
        const auto hw = sample_hardware(cfg, rng, 4);
        const auto cands = enumerate_candidates(q, hw, 20, rng);
        CHECK(cands.size() <= 20);
        std::set<std::map<std::string, std::string>> seen;
        for (const auto& p : cands) {
            CHECK(rule_oracle::valid(q, hw, p));
            CHECK(check_rules(q, hw, p).ok());
            seen.insert(p.assignment);
        }
        CHECK(seen.size() == cands.size());
    }
}

TEST_CASE("enumeration input errors") {
    auto rng = item_rng(0, 0);
    CHECK_THROWS_AS((void)enumerate_candidates(chain(), {}, 3, rng), Error);
    QueryGraph bad = chain();
    bad.edges.pop_back();
    try {
        (void)enumerate_candidates(bad, {medium_host("h")}, 3, rng);
        FAIL("accepted an invalid query");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidQuery);
    }
}

TEST_CASE("ensemble aggregation") {
    const auto agg = aggregate_predictions({{Metric::Throughput, {100, 200, 600}},
                                            {Metric::Backpressure, {0.6, 0.4, 0.7}},
                                            {Metric::Success, {0.6, 0.4, 0.2}}});
    CHECK(agg.at(Metric::Throughput) == doctest::Approx(300));
    CHECK(agg.at(Metric::Backpressure) == 1.0);
    CHECK(agg.at(Metric::Success) == 0.0);
    CHECK(aggregate_predictions({{Metric::Success, {0.5}}}).at(Metric::Success) == 1.0);
}

TEST_CASE("selection skips predicted failures and backpressure") {
    const std::vector<PlacementCandidate> c = {candidate(10, 0.1, 0.0), candidate(20, 0.9, 0.9),
                                               candidate(50, 0.9, 0.1), candidate(30, 0.8, 0.2)};
    const auto s = select_placement(c, Metric::ProcLatency, Direction::Minimize);
    CHECK(s.chosen == std::optional<std::size_t>(3));
    CHECK_FALSE(s.none_viable);
    CHECK(s.decisions ==
          std::vector<std::string>{"predicted-failure", "predicted-backpressure", "viable", "viable"});
    const auto t = select_placement(c, Metric::ProcLatency, Direction::Maximize);
    CHECK(t.chosen == std::optional<std::size_t>(2));
}

TEST_CASE("ties keep the first candidate") {
    const std::vector<PlacementCandidate> c = {candidate(5, 1, 0), candidate(5, 1, 0)};
    CHECK(select_placement(c, Metric::ProcLatency, Direction::Minimize).chosen == std::optional<std::size_t>(0));
}

TEST_CASE("selection is invariant to positive scaling of the target") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(1, 1000);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<PlacementCandidate> a, b;
        for (int i = 0; i < 8; ++i) {
            const double v = u(rng);
            const double ok = u(rng) > 200 ? 1.0 : 0.0;
            a.push_back(candidate(v, ok, 0));
            b.push_back(candidate(v * 3.7, ok, 0));
        }
        CHECK(select_placement(a, Metric::ProcLatency, Direction::Minimize).chosen ==
              select_placement(b, Metric::ProcLatency, Direction::Minimize).chosen);
    }
}

TEST_CASE("no viable candidate falls back to the most likely success") {
    const std::vector<PlacementCandidate> c = {candidate(10, 0.2, 0), candidate(10, 0.45, 0), candidate(1, 0.9, 0.8)};
    const auto s = select_placement(c, Metric::ProcLatency, Direction::Minimize);
    CHECK_FALSE(s.chosen.has_value());
    CHECK(s.none_viable);
    CHECK(s.fallback == std::optional<std::size_t>(2));
    CHECK_THROWS_AS((void)select_placement({}, Metric::ProcLatency, Direction::Minimize), Error);
}

TEST_CASE("default directions") {
    CHECK(default_direction(Metric::Throughput) == Direction::Maximize);
    CHECK(default_direction(Metric::E2ELatency) == Direction::Minimize);
    CHECK(default_direction(Metric::ProcLatency) == Direction::Minimize);
}

TEST_CASE("speed-up") {
    CHECK(speedup(100, 25) == 4.0);
    CHECK(speedup(10, 20) == 0.5);
    try {
        (void)speedup(0, 1);
        FAIL("accepted zero");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonPositive);
    }
}

TEST_CASE("ensemble checks") {
    ModelSpec spec;
    spec.hidden_dim = 4;
    spec.metric = Metric::Success;
    std::vector<JointGraph> gs = {random_instance(1).graph};
    const auto m = ModelCheckpoint::initialise(spec, fit_stats(gs));
    CHECK_NOTHROW(check_ensembles({{Metric::Success, {m}}}));
    CHECK_THROWS_AS(check_ensembles({{Metric::Success, {m, m}}}), Error);
    CHECK_THROWS_AS(check_ensembles({{Metric::Backpressure, {m}}}), Error);
    CHECK_THROWS_AS(check_ensembles({{Metric::Success, {}}}), Error);
}

TEST_CASE("the oracle predictor reports simulator labels") {
    const auto in = random_instance(17);
    SimConfig sim;
    sim.rng_seed = 3;
    const auto cand = predict_candidate(in.placement, in.query, in.hardware, oracle_predictor(sim));
    const auto truth = simulate(in.graph, sim);
    CHECK(cand.aggregate.at(Metric::Throughput) == truth.throughput);
    CHECK(cand.aggregate.at(Metric::Success) == (truth.success ? 1.0 : 0.0));
}
