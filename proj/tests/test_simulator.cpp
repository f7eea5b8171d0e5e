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

#include <streamcost/simulator.hpp>

#include <doctest.h>

#include <cmath>

using namespace streamcost;
using namespace fixtures;

namespace {

SimConfig quiet() {
    SimConfig c;
    c.noise_sigma = 0.0;
    return c;
}

std::size_t index_of(const JointGraph& g, const std::string& id) {
    for (std::size_t i = 0; i < g.operator_count(); ++i)
        if (g.query.operators[i].id == id) return i;
    FAIL("no operator " << id);
    return 0;
}

}  // namespace

TEST_CASE("filter rate algebra") {
    const auto q = chain(1000, 0.37);
    const auto g = build_joint_graph(q, {host("h", 800)}, place_all(q, "h"));
    const auto fa = propagate_rates(g, quiet());
    CHECK(fa.operators[index_of(g, "k")].input_rate == doctest::Approx(370.0).epsilon(1e-14));
}

TEST_CASE("aggregation rate algebra") {
    QueryGraph q;
    q.operators = {source("s", 640), aggregation("g", 1.0 / 64, count_window(64)), sink("k", 2)};
    q.edges = {{"s", "g"}, {"g", "k"}};
    const auto g = build_joint_graph(q, {host("h", 800)}, place_all(q, "h"));
    CHECK(propagate_rates(g, quiet()).operators[index_of(g, "g")].output_rate == doctest::Approx(10.0));
}

TEST_CASE("time-window join output matches enumerating one window") {
    const auto q = two_way(100, 100, 0.01, time_window(2));
    const auto g = build_joint_graph(q, {host("h", 800)}, place_all(q, "h"));
    const double out = propagate_rates(g, quiet()).operators[index_of(g, "j")].output_rate;
    // One 2 s window holds 200 tuples per stream; every pair qualifies with probability 0.01.
    double pairs = 0.0;
    for (int a = 0; a < 200; ++a)
        for (int b = 0; b < 200; ++b) pairs += 1.0;
    CHECK(out == doctest::Approx(0.01 * pairs / 2.0));
    CHECK(out == doctest::Approx(200.0));
}

TEST_CASE("count-window join uses the faster stream to fill the window") {
    const auto q = two_way(100, 50, 0.01, count_window(200));
    const auto g = build_joint_graph(q, {host("h", 800)}, place_all(q, "h"));
    const auto& j = propagate_rates(g, quiet()).operators[index_of(g, "j")];
    const double w_sec = 200.0 / 100.0;
    CHECK(j.window_seconds == doctest::Approx(w_sec));
    CHECK(j.output_rate == doctest::Approx(0.01 * 100 * 50 * w_sec));
}

TEST_CASE("capacity and residence time") {
    const auto q = chain(19999, 0.5);
    Placement p;
    p.assignment = {{"s", "big"}, {"f", "h"}, {"k", "big"}};
    const auto g = build_joint_graph(q, {host("big", 800), host("h", 100)}, p);
    const auto cfg = quiet();
    const auto fa = capacity_and_latency(g, propagate_rates(g, cfg), cfg);
    const auto& f = fa.operators[index_of(g, "f")];
    CHECK(f.capacity == doctest::Approx(20000.0));
    CHECK(f.residence_ms == doctest::Approx(1000.0));
    for (const auto& e : fa.edges) {
        CHECK(e.crossing);
        CHECK(e.latency_ms == 5.0);
    }
}

TEST_CASE("equal cpu sharing between co-located operators") {
    QueryGraph q;
    q.operators = {source("s", 10), filter("f1", 0.5), filter("f2", 0.5), sink("k")};
    q.edges = {{"s", "f1"}, {"f1", "f2"}, {"f2", "k"}};
    Placement p;
    p.assignment = {{"s", "a"}, {"f1", "b"}, {"f2", "b"}, {"k", "a"}};
    const auto g = build_joint_graph(q, {host("a"), host("b", 200)}, p);
    const auto cfg = quiet();
    const auto fa = capacity_and_latency(g, propagate_rates(g, cfg), cfg);
    CHECK(fa.operators[index_of(g, "f1")].capacity == doctest::Approx(20000.0));
    CHECK(fa.operators[index_of(g, "f2")].capacity == doctest::Approx(20000.0));
}

TEST_CASE("unsaturated small query: exact analytic labels") {
    const auto q = chain(100, 0.5);
    Placement p;
    p.assignment = {{"s", "a"}, {"f", "a"}, {"k", "b"}};
    const auto g = build_joint_graph(q, {host("a", 300, 8000, 1000, 7), host("b", 100, 8000, 1000, 3)}, p);
    const auto c = simulate(g, quiet());
    CHECK(c.success);
    CHECK_FALSE(c.backpressure);
    CHECK(c.throughput == doctest::Approx(50.0).epsilon(1e-14));
    // Hand computation: two ops share 300 % on host a, the sink is alone on b.
    const double mu_s = 1.5 * 10000 / 0.2, mu_f = 1.5 * 10000 / 0.5, mu_k = 1.0 * 10000 / 0.2;
    const double lp = 1000 / (mu_s - 100) + 1000 / (mu_f - 100) + 7.0 + 1000 / (mu_k - 50);
    CHECK(*c.proc_latency == doctest::Approx(lp).epsilon(1e-12));
    CHECK(*c.e2e_latency == *c.proc_latency);
}

TEST_CASE("forced saturation creates backpressure") {
    // Filter capacity 20000/s on its own 100 % host, source offers twice that.
    const auto q = chain(40000, 0.5);
    Placement p;
    p.assignment = {{"s", "big"}, {"f", "h"}, {"k", "big"}};
    const auto g = build_joint_graph(q, {host("big", 800, 8000, 100000), host("h", 100, 8000, 100000)}, p);
    const auto tr = trace_simulation(g, quiet());
    CHECK(tr.backpressure_rate == doctest::Approx(20000.0));
    const auto c = simulate(g, quiet());
    CHECK(c.backpressure);
    CHECK(*c.e2e_latency > *c.proc_latency);
    CHECK(*c.e2e_latency - *c.proc_latency == doctest::Approx(1000 * 120 * 0.5));
}

TEST_CASE("bandwidth saturation throttles the source") {
    // 1000 tuples/s x 4 fields x 8 bytes = 32000 B/s over a 0.128 Mbit/s (16000 B/s) link.
    const auto q = chain(1000, 1.0);
    Placement p;
    p.assignment = {{"s", "a"}, {"f", "a"}, {"k", "b"}};
    const auto g = build_joint_graph(q, {host("a", 800, 8000, 0.128), host("b", 800)}, p);
    const auto c = simulate(g, quiet());
    CHECK(c.backpressure);
    CHECK(c.throughput == doctest::Approx(500.0));
}

TEST_CASE("window state against host memory") {
    auto q = two_way(100, 100, 0.01, count_window(640));
    for (auto& op : q.operators)
        if (op.kind == OperatorKind::Source) op.features.tuple_width_out = 10;
    const double state = 4.0 * 640 * 10 * 8 * 2;
    CHECK(state == 409600.0);
    const auto ok = build_joint_graph(q, {host("h", 800, 1024)}, place_all(q, "h"));
    CHECK(trace_simulation(ok, quiet()).offered.operators[index_of(ok, "j")].state_bytes * 4.0 == state);
    CHECK(simulate(ok, quiet()).success);
    const auto small = build_joint_graph(q, {host("h", 800, 0.3)}, place_all(q, "h"));
    const auto c = simulate(small, quiet());
    CHECK_FALSE(c.success);
    CHECK(c.throughput == 0.0);
    CHECK_FALSE(c.proc_latency.has_value());
}

TEST_CASE("starved output is a failure") {
    // Selectivity 0 filter: nothing reaches the sink.
    const auto q = chain(100, 0.0);
    const auto g = build_joint_graph(q, {host("h", 400)}, place_all(q, "h"));
    CHECK_FALSE(simulate(g, quiet()).success);
}

TEST_CASE("noise is deterministic per seed and lognormal") {
    const auto q = chain(100, 0.5);
    const auto g = build_joint_graph(q, {host("h", 400)}, place_all(q, "h"));
    SimConfig cfg;
    cfg.rng_seed = 42;
    CHECK(simulate(g, cfg) == simulate(g, cfg));
    cfg.rng_seed = 43;
    const auto other = simulate(g, cfg);
    CHECK(other.throughput != simulate(g, quiet()).throughput);
    // log of the noise factor over many seeds has mean ~0 and sd ~sigma.
    double sum = 0, sq = 0;
    const int n = 4000;
    const double clean = simulate(g, quiet()).throughput;
    for (int s = 0; s < n; ++s) {
        cfg.rng_seed = static_cast<std::uint64_t>(s);
        const double z = std::log(simulate(g, cfg).throughput / clean);
        sum += z;
        sq += z * z;
    }
    const double mean = sum / n, sd = std::sqrt(sq / n - mean * mean);
    CHECK(std::abs(mean) < 0.01);
    CHECK(sd == doctest::Approx(0.1).epsilon(0.05));
}

TEST_CASE("simulator properties over generated graphs") {
    const auto cfg = quiet();
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        const auto in = random_instance(seed);
        const auto base = simulate(in.graph, cfg);
        // Classification labels ignore noise.
        SimConfig noisy;
        noisy.rng_seed = seed;
        const auto n = simulate(in.graph, noisy);
        CHECK(n.success == base.success);
        CHECK(n.backpressure == base.backpressure);
        if (base.success && !base.backpressure) CHECK(*base.e2e_latency == *base.proc_latency);
        CHECK(base.throughput >= 0.0);

        // More cpu everywhere never hurts.
        auto hw = in.hardware;
        for (auto& h : hw) h.cpu *= 2;
        const auto up = simulate(build_joint_graph(in.query, hw, in.placement), cfg);
        const auto tr0 = trace_simulation(in.graph, cfg);
        const auto tr1 = trace_simulation(build_joint_graph(in.query, hw, in.placement), cfg);
        CHECK(tr1.sink_rate >= tr0.sink_rate * (1 - 1e-12));
        CHECK(tr1.proc_latency_ms <= tr0.proc_latency_ms * (1 + 1e-12));
        if (base.success && up.success) CHECK(up.throughput >= base.throughput * (1 - 1e-12));

        // One host: no network terms.
        const auto one = build_joint_graph(in.query, {in.hardware.front()}, place_all(in.query, in.hardware.front().id));
        const auto tr = trace_simulation(one, cfg);
        for (const auto& e : tr.offered.edges) CHECK(e.latency_ms == 0.0);
    }
}
