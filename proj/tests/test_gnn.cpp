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
#include "gradcheck.hpp"
#include "reference_model.hpp"

#include <streamcost/checkpoint.hpp>
#include <streamcost/error.hpp>
#include <streamcost/gnn.hpp>

#include <doctest.h>

#include <cmath>

using namespace streamcost;
using namespace fixtures;

namespace {

NormalizationStats stats_for(std::uint64_t first, std::uint64_t count) {
    std::vector<JointGraph> gs;
    for (std::uint64_t s = first; s < first + count; ++s) gs.push_back(random_instance(s).graph);
    return fit_stats(gs);
}

ModelCheckpoint model(Metric m = Metric::Throughput, Scheme s = Scheme::Novel, Featurization f = Featurization::Full,
                      std::size_t hidden = 8, std::uint64_t seed = 1) {
    ModelSpec spec;
    spec.hidden_dim = hidden;
    spec.metric = m;
    spec.scheme = s;
    spec.featurization = f;
    spec.seed = seed;
    return ModelCheckpoint::initialise(spec, stats_for(1, 40));
}

void zero(Mlp& m) { m.set_zero(); }

bool close(double a, double b, double rel = 1e-10) { return std::abs(a - b) <= rel * std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("task kind follows the metric") {
    CHECK(task_for(Metric::Throughput) == TaskKind::Regression);
    CHECK(task_for(Metric::E2ELatency) == TaskKind::Regression);
    CHECK(task_for(Metric::Backpressure) == TaskKind::Binary);
    CHECK(task_for(Metric::Success) == TaskKind::Binary);
}

TEST_CASE("zero encoders give zero states") {
    auto c = model();
    for (auto& e : c.params.encoders) zero(e);
    const auto g = random_instance(5).graph;
    const auto s = encode_all(g, c);
    CHECK(s.states.cols() == static_cast<Eigen::Index>(g.node_count()));
    CHECK(s.states.isZero(0.0));
}

TEST_CASE("a one-layer encoder selecting the cpu slot passes it through") {
    auto c = model();
    const auto t = static_cast<std::size_t>(NodeType::Hardware);
    const auto width = FeatureSchema::standard().width(NodeType::Hardware);
    Layer l;
    l.weight = Matrix::Zero(static_cast<Eigen::Index>(c.hidden_dim), static_cast<Eigen::Index>(width));
    l.weight(0, 0) = 1.0;  // cpu slot
    l.bias = Vector::Zero(static_cast<Eigen::Index>(c.hidden_dim));
    c.params.encoders[t].layers = {l};
    const auto g = random_instance(8).graph;
    const auto s = encode_all(g, c);
    const auto& h = g.hardware.front();
    CHECK(s.at("hw:" + h.id)[0] == encode_node(h, c.stats)[0]);
}

TEST_CASE("single operator on a single host: dependency structure") {
    QueryGraph q;
    q.operators = {source("s", 100), sink("k")};
    q.edges = {{"s", "k"}};
    const auto g = build_joint_graph(q, {host("h", 100)}, place_all(q, "h"));
    const auto c = model();
    const auto s0 = encode_all(g, c);
    const auto s1 = message_pass(g, s0, c);
    // Host state changes when an operator's initial state changes.
    auto s0b = s0;
    s0b.states.col(0) += Vector::Ones(static_cast<Eigen::Index>(c.hidden_dim));
    const auto s1b = message_pass(g, s0b, c);
    CHECK((s1.at("hw:h") - s1b.at("hw:h")).norm() > 0);
    // Operator states change when the host's initial state changes.
    auto s0c = s0;
    s0c.states.col(2) += Vector::Ones(static_cast<Eigen::Index>(c.hidden_dim));
    const auto s1c = message_pass(g, s0c, c);
    CHECK((s1.at("op:s") - s1c.at("op:s")).norm() > 0);
}

TEST_CASE("zero update networks collapse updated states to the bias image") {
    auto c = model();
    for (auto& u : c.params.updates) zero(u);
    const auto g = random_instance(11).graph;
    const auto s = message_pass(g, encode_all(g, c), c);
    CHECK(s.states.isZero(0.0));
}

TEST_CASE("zero readout weights give the decoded bias") {
    for (auto m : {Metric::Throughput, Metric::Success}) {
        auto c = model(m);
        for (auto& l : c.params.readout.layers) l.weight.setZero();
        c.params.readout.layers.back().bias[0] = 0.7;
        const auto g = random_instance(2).graph;
        const double expected = m == Metric::Throughput ? std::expm1(0.7) : 1.0 / (1.0 + std::exp(-0.7));
        CHECK(predict(g, c) == doctest::Approx(expected).epsilon(1e-15));
    }
}

TEST_CASE("readout pools every node state") {
    // Ops-only model with zeroed updates: the source keeps its encoded state
    // (no senders) and the sink collapses to zero.
    QueryGraph q;
    q.operators = {source("s", 100), sink("k")};
    q.edges = {{"s", "k"}};
    const auto g = build_joint_graph(q, {host("h")}, place_all(q, "h"));
    auto c = model(Metric::Throughput, Scheme::Novel, Featurization::OpsOnly);
    for (auto& u : c.params.updates) zero(u);
    const auto s = message_pass(g, encode_all(g, c), c);
    const double via_readout = readout(g, s, c);
    Vector pooled = s.states.col(0) + s.states.col(1);
    CHECK(via_readout == doctest::Approx(std::expm1(reference::mlp(c.params.readout, pooled)[0])));
}

TEST_CASE("batched forward equals the straight-line reference") {
    for (auto scheme : {Scheme::Novel, Scheme::Traditional})
        for (auto feat : {Featurization::Full, Featurization::NoHardware, Featurization::OpsOnly})
            for (auto metric : {Metric::ProcLatency, Metric::Backpressure}) {
                const auto c = model(metric, scheme, feat, 8, 3);
                for (std::uint64_t s = 1; s <= 15; ++s) {
                    const auto g = random_instance(100 + s).graph;
                    const GraphInput in = compile(g, c);
                    CHECK(close(raw_output(in, c), reference::raw_output(g, c)));
                    CHECK(close(predict(g, c), reference::prediction(g, c)));
                }
            }
}

TEST_CASE("batching does not change outputs") {
    const auto c = model(Metric::Throughput, Scheme::Novel, Featurization::Full, 8, 2);
    std::vector<GraphInput> inputs;
    for (std::uint64_t s = 1; s <= 9; ++s) inputs.push_back(compile(random_instance(200 + s).graph, c));
    std::vector<const GraphInput*> ptrs;
    for (const auto& in : inputs) ptrs.push_back(&in);
    const auto batched = batch_raw_outputs(c, ptrs);
    for (std::size_t i = 0; i < inputs.size(); ++i) CHECK(close(batched[i], raw_output(inputs[i], c), 1e-12));
}

TEST_CASE("traditional scheme on a graph without edges") {
    // Ops-only: the source has no senders and still gets three updates with a
    // zero message.
    QueryGraph q;
    q.operators = {source("s", 100), sink("k")};
    q.edges = {{"s", "k"}};
    const auto g = build_joint_graph(q, {host("h")}, place_all(q, "h"));
    auto c = model(Metric::Throughput, Scheme::Traditional, Featurization::OpsOnly);
    const auto s0 = encode_all(g, c);
    const auto s1 = forward_traditional(g, s0, c);
    const auto zero_msg = Vector::Zero(static_cast<Eigen::Index>(c.hidden_dim));
    Vector src = s0.at("op:s");
    for (int r = 0; r < 3; ++r)
        src = reference::update(c.params.updates[static_cast<std::size_t>(NodeType::Source)], zero_msg, src);
    CHECK((s1.at("op:s") - src).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("novel and traditional schemes differ") {
    auto a = model(Metric::Throughput, Scheme::Novel);
    auto b = a;
    b.scheme = Scheme::Traditional;
    const auto g = random_instance(31).graph;
    CHECK(predict(g, a) != predict(g, b));
}

TEST_CASE("loss and gradient at the optimum") {
    CHECK(example_loss(TaskKind::Regression, 9.0, std::log1p(9.0)) == 0.0);
    CHECK(example_loss_gradient(TaskKind::Regression, 9.0, std::log1p(9.0)) == 0.0);
    CHECK(example_loss(TaskKind::Binary, 1.0, 0.0) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("weighted batch loss combines per-example terms") {
    const auto p = gradcheck::setup(5, Metric::Success, Scheme::Novel);
    const GraphInput* both[] = {&p.inputs[0], &p.inputs[1]};
    const double w[] = {0.25, 3.0};
    auto g = p.ckpt.params.zeros_like();
    const double loss = batch_loss_and_gradient(p.ckpt, both, p.targets, &g, w).loss;
    double expect = 0.0;
    std::vector<double> combined(g.parameter_count(), 0.0);
    for (std::size_t i = 0; i < 2; ++i) {
        const GraphInput* one[] = {&p.inputs[i]};
        const double t[] = {p.targets[i]};
        auto gi = p.ckpt.params.zeros_like();
        expect += w[i] * batch_loss_and_gradient(p.ckpt, one, t, &gi).loss / 2;
        const auto f = gi.flatten();
        for (std::size_t k = 0; k < f.size(); ++k) combined[k] += w[i] * f[k] / 2;
    }
    CHECK(close(loss, expect));
    const auto got = g.flatten();
    for (std::size_t k = 0; k < got.size(); ++k) REQUIRE(std::abs(got[k] - combined[k]) <= 1e-12);
    const double bad[] = {1.0};
    CHECK_THROWS_AS((void)batch_loss_and_gradient(p.ckpt, both, p.targets, nullptr, bad), Error);
}

TEST_CASE("full-model gradients match finite differences") {
    std::uint64_t seed = 1;
    for (auto metric : {Metric::Throughput, Metric::Success})
        for (auto scheme : {Scheme::Novel, Scheme::Traditional}) {
            const auto r = gradcheck::run(seed++, metric, scheme);
            INFO("worst relative error " << r.worst);
            CHECK(r.failures == 0);
        }
}

TEST_CASE("checkpoint round trip and rejection") {
    const auto c = model(Metric::Backpressure, Scheme::Traditional, Featurization::NoHardware, 8, 4);
    const auto j = checkpoint_to_json(c);
    const auto back = checkpoint_from_json(j);
    CHECK(back == c);
    CHECK(back.parameter_hash() == c.parameter_hash());
    CHECK(j.at("scheme") == "traditional");
    CHECK(j.at("featurization") == to_string(Featurization::NoHardware));

    auto bad = j;
    bad["format_version"] = 99;
    try {
        (void)checkpoint_from_json(bad);
        FAIL("accepted a future version");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SchemaMismatch);
    }
    bad = j;
    bad["feature_widths"]["filter"] = 3;
    try {
        (void)checkpoint_from_json(bad);
        FAIL("accepted mismatched widths");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DimensionMismatch);
    }
    bad = j;
    bad["readout"][0]["bias"]["data"][0] = 1.2345;
    try {
        (void)checkpoint_from_json(bad);
        FAIL("accepted a tampered parameter");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Format);
    }
}

TEST_CASE("initialisation is seeded") {
    const auto a = model(Metric::Throughput, Scheme::Novel, Featurization::Full, 8, 1);
    const auto b = model(Metric::Throughput, Scheme::Novel, Featurization::Full, 8, 1);
    const auto c = model(Metric::Throughput, Scheme::Novel, Featurization::Full, 8, 2);
    CHECK(a == b);
    CHECK(a.parameter_hash() != c.parameter_hash());
}
