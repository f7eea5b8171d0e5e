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

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace streamcost {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Layer {
    Matrix weight;  // out x in
    Vector bias;    // out

    bool operator==(const Layer&) const = default;
};

/// Fully connected network, ReLU between layers and identity on the last.
/// Inputs are column-batched: one column per sample.
struct Mlp {
    std::vector<Layer> layers;

    /// He-initialised network with the given layer widths (input first).
    [[nodiscard]] static Mlp make(const std::vector<std::size_t>& dims, std::mt19937_64& rng);
    /// Same shape, all zeros.
    [[nodiscard]] Mlp zeros_like() const;

    [[nodiscard]] std::size_t input_dim() const;
    [[nodiscard]] std::size_t output_dim() const;
    [[nodiscard]] std::size_t parameter_count() const;
    void set_zero();
    [[nodiscard]] bool all_finite() const;

    [[nodiscard]] Matrix forward(const Matrix& x) const;

    bool operator==(const Mlp&) const = default;
};

/// Activations recorded by a forward pass for the backward pass.
struct MlpTape {
    std::vector<Matrix> inputs;       // input of each layer
    std::vector<Matrix> pre_activation;
};

[[nodiscard]] Matrix forward(const Mlp& mlp, const Matrix& x, MlpTape& tape);

/// Accumulates parameter gradients into `grads` (same shape as `mlp`) and
/// returns the gradient with respect to the input.
Matrix backward(const Mlp& mlp, const MlpTape& tape, const Matrix& grad_out, Mlp& grads);

/// Visits (data, size) of every weight and bias block in a fixed order.
void for_each_block(Mlp& mlp, const std::function<void(double*, std::size_t)>& fn);
void for_each_block(const Mlp& mlp, const std::function<void(const double*, std::size_t)>& fn);

[[nodiscard]] double logistic(double z);

/// Mean squared logarithmic error, (1/N) sum (ln(1+y) - ln(1+yhat))^2.
[[nodiscard]] double msle_loss(std::span<const double> y, std::span<const double> yhat);
/// d msle / d yhat.
[[nodiscard]] std::vector<double> msle_gradient(std::span<const double> y, std::span<const double> yhat);

/// Binary cross-entropy of a logit, computed without overflow.
[[nodiscard]] double bce_loss(double label, double logit);
/// d bce / d logit.
[[nodiscard]] double bce_gradient(double label, double logit);

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Adam over a flat parameter vector.
class Adam {
  public:
    Adam(std::size_t parameter_count, AdamConfig cfg) : cfg_(cfg), m_(parameter_count, 0.0), v_(parameter_count, 0.0) {}

    void step(std::span<double> params, std::span<const double> grads);
    void set_learning_rate(double lr) { cfg_.learning_rate = lr; }

  private:
    AdamConfig cfg_;
    std::vector<double> m_;
    std::vector<double> v_;
    long t_ = 0;
};

/// Scales `grads` in place so that its L2 norm is at most `max_norm`; returns
/// the norm before clipping.
double clip_by_norm(std::span<double> grads, double max_norm);

}  // namespace streamcost
