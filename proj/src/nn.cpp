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

#include <streamcost/error.hpp>
#include <streamcost/nn.hpp>

#include <cmath>

namespace streamcost {

Mlp Mlp::make(const std::vector<std::size_t>& dims, std::mt19937_64& rng) {
    if (dims.size() < 2) throw Error(ErrorCode::InvalidArgument, "an MLP needs at least two layer widths");
    Mlp mlp;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const auto in = static_cast<Eigen::Index>(dims[l]);
        const auto out = static_cast<Eigen::Index>(dims[l + 1]);
        std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / static_cast<double>(dims[l])));
        Layer layer{Matrix(out, in), Vector::Zero(out)};
        for (Eigen::Index c = 0; c < in; ++c)
            for (Eigen::Index r = 0; r < out; ++r) layer.weight(r, c) = normal(rng);
        mlp.layers.push_back(std::move(layer));
    }
    return mlp;
}

Mlp Mlp::zeros_like() const {
    Mlp z = *this;
    z.set_zero();
    return z;
}

std::size_t Mlp::input_dim() const { return static_cast<std::size_t>(layers.front().weight.cols()); }
std::size_t Mlp::output_dim() const { return static_cast<std::size_t>(layers.back().weight.rows()); }

std::size_t Mlp::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    return n;
}

void Mlp::set_zero() {
    for (auto& l : layers) {
        l.weight.setZero();
        l.bias.setZero();
    }
}

bool Mlp::all_finite() const {
    for (const auto& l : layers)
        if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
    return true;
}

Matrix Mlp::forward(const Matrix& x) const {
    Matrix h = x;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        Matrix z = layers[l].weight * h;
        z.colwise() += layers[l].bias;
        h = (l + 1 < layers.size()) ? Matrix(z.cwiseMax(0.0)) : z;
    }
    return h;
}

Matrix forward(const Mlp& mlp, const Matrix& x, MlpTape& tape) {
    tape.inputs.clear();
    tape.pre_activation.clear();
    Matrix h = x;
    for (std::size_t l = 0; l < mlp.layers.size(); ++l) {
        tape.inputs.push_back(h);
        Matrix z = mlp.layers[l].weight * h;
        z.colwise() += mlp.layers[l].bias;
        h = (l + 1 < mlp.layers.size()) ? Matrix(z.cwiseMax(0.0)) : z;
        tape.pre_activation.push_back(std::move(z));
    }
    return h;
}

Matrix backward(const Mlp& mlp, const MlpTape& tape, const Matrix& grad_out, Mlp& grads) {
    Matrix g = grad_out;
    for (std::size_t l = mlp.layers.size(); l-- > 0;) {
        if (l + 1 < mlp.layers.size()) g = g.cwiseProduct((tape.pre_activation[l].array() > 0.0).cast<double>().matrix());
        grads.layers[l].weight.noalias() += g * tape.inputs[l].transpose();
        grads.layers[l].bias.noalias() += g.rowwise().sum();
        g = mlp.layers[l].weight.transpose() * g;
    }
    return g;
}

void for_each_block(Mlp& mlp, const std::function<void(double*, std::size_t)>& fn) {
    for (auto& l : mlp.layers) {
        fn(l.weight.data(), static_cast<std::size_t>(l.weight.size()));
        fn(l.bias.data(), static_cast<std::size_t>(l.bias.size()));
    }
}

void for_each_block(const Mlp& mlp, const std::function<void(const double*, std::size_t)>& fn) {
    for (const auto& l : mlp.layers) {
        fn(l.weight.data(), static_cast<std::size_t>(l.weight.size()));
        fn(l.bias.data(), static_cast<std::size_t>(l.bias.size()));
    }
}

double logistic(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double msle_loss(std::span<const double> y, std::span<const double> yhat) {
    if (y.size() != yhat.size() || y.empty())
        throw Error(ErrorCode::DimensionMismatch, "msle needs two equally sized non-empty batches");
    double sum = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] < 0.0 || yhat[i] < 0.0) throw Error(ErrorCode::NegativeInput, "msle inputs must be non-negative");
        const double d = std::log1p(y[i]) - std::log1p(yhat[i]);
        sum += d * d;
    }
    return sum / static_cast<double>(y.size());
}

std::vector<double> msle_gradient(std::span<const double> y, std::span<const double> yhat) {
    if (y.size() != yhat.size() || y.empty())
        throw Error(ErrorCode::DimensionMismatch, "msle needs two equally sized non-empty batches");
    std::vector<double> g(y.size());
    const double n = static_cast<double>(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] < 0.0 || yhat[i] < 0.0) throw Error(ErrorCode::NegativeInput, "msle inputs must be non-negative");
        g[i] = -2.0 * (std::log1p(y[i]) - std::log1p(yhat[i])) / (n * (1.0 + yhat[i]));
    }
    return g;
}

double bce_loss(double label, double logit) {
    return std::max(logit, 0.0) - logit * label + std::log1p(std::exp(-std::abs(logit)));
}

double bce_gradient(double label, double logit) { return logistic(logit) - label; }

void Adam::step(std::span<double> params, std::span<const double> grads) {
    if (params.size() != m_.size() || grads.size() != m_.size())
        throw Error(ErrorCode::DimensionMismatch, "optimizer state does not match parameter count");
    ++t_;
    const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grads[i];
        v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * grads[i] * grads[i];
        params[i] -= cfg_.learning_rate * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + cfg_.epsilon);
    }
}

double clip_by_norm(std::span<double> grads, double max_norm) {
    double sq = 0.0;
    for (double g : grads) sq += g * g;
    const double norm = std::sqrt(sq);
    if (norm > max_norm && norm > 0.0) {
        const double s = max_norm / norm;
        for (double& g : grads) g *= s;
    }
    return norm;
}

}  // namespace streamcost
