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

// Central finite differences over every parameter of a cost model.

#pragma once

#include "fixtures.hpp"

#include <streamcost/featurize.hpp>
#include <streamcost/gnn.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace gradcheck {

using namespace streamcost;

struct Result {
    std::size_t parameters = 0;
    std::size_t failures = 0;
    double worst = 0.0;  // largest relative error
};

/// Relative error with a floor on the denominator; gradients below the floor
/// are at the finite-difference noise level.
inline double relative_error(double a, double b, double floor = 1e-6) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

/// A model at a generic point plus two graphs and their targets.
struct Problem {
    ModelCheckpoint ckpt;
    std::vector<GraphInput> inputs;
    std::vector<double> targets;

    [[nodiscard]] double loss(ModelParams* grads = nullptr) const {
        const GraphInput* ptrs[] = {&inputs[0], &inputs[1]};
        return batch_loss_and_gradient(ckpt, ptrs, targets, grads).loss;
    }
};

inline Problem setup(std::uint64_t seed, Metric metric, Scheme scheme, std::size_t hidden = 6) {
    std::vector<fixtures::Instance> instances = {fixtures::random_instance(seed * 7 + 1),
                                                 fixtures::random_instance(seed * 7 + 2)};
    std::vector<JointGraph> sample;
    for (std::uint64_t i = 0; i < 40; ++i) sample.push_back(fixtures::random_instance(100000 + i).graph);
    ModelSpec spec;
    spec.hidden_dim = hidden;
    spec.metric = metric;
    spec.scheme = scheme;
    spec.seed = seed;
    Problem p{ModelCheckpoint::initialise(spec, fit_stats(sample)), {}, {}};
    // Zero biases can put pre-activations exactly on a ReLU kink, where finite
    // differences see a one-sided slope; check at a generic point instead.
    std::mt19937_64 jitter(seed);
    std::uniform_real_distribution<double> u(-0.1, 0.1);
    auto shake = [&](Mlp& m) {
        for (auto& l : m.layers)
            for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias[i] = u(jitter);
    };
    for (auto& m : p.ckpt.params.encoders) shake(m);
    for (auto& m : p.ckpt.params.updates) shake(m);
    shake(p.ckpt.params.readout);
    for (const auto& in : instances) p.inputs.push_back(compile(in.graph, p.ckpt));
    p.targets = is_binary(metric) ? std::vector<double>{1.0, 0.0} : std::vector<double>{120.0 + double(seed), 3.5};
    return p;
}

inline Result run(std::uint64_t seed, Metric metric, Scheme scheme, std::size_t hidden = 6, double step = 1e-5,
                  double tolerance = 1e-4) {
    auto p = setup(seed, metric, scheme, hidden);
    auto& ckpt = p.ckpt;
    auto grads = ckpt.params.zeros_like();
    (void)p.loss(&grads);
    const auto analytic = grads.flatten();
    auto flat = ckpt.params.flatten();

    Result r;
    r.parameters = flat.size();
    for (std::size_t i = 0; i < flat.size(); ++i) {
        const double keep = flat[i];
        flat[i] = keep + step;
        ckpt.params.assign(flat);
        const double lp = p.loss();
        flat[i] = keep - step;
        ckpt.params.assign(flat);
        const double lm = p.loss();
        flat[i] = keep;
        const double fd = (lp - lm) / (2 * step);
        const double e = relative_error(analytic[i], fd);
        r.worst = std::max(r.worst, e);
        if (e > tolerance) ++r.failures;
    }
    ckpt.params.assign(flat);
    return r;
}

}  // namespace gradcheck
