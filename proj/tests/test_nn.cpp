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

#include <doctest.h>

#include <cmath>
#include <random>

using namespace streamcost;

namespace {

// Straight-line MLP forward: ReLU on hidden layers, identity on the last.
Vector ref_forward(const Mlp& m, Vector x) {
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        Vector y = Vector::Zero(m.layers[l].weight.rows());
        for (Eigen::Index r = 0; r < y.size(); ++r) {
            double s = m.layers[l].bias[r];
            for (Eigen::Index c = 0; c < x.size(); ++c) s += m.layers[l].weight(r, c) * x[c];
            y[r] = (l + 1 < m.layers.size()) ? std::max(s, 0.0) : s;
        }
        x = y;
    }
    return x;
}

}  // namespace

TEST_CASE("msle formula") {
    const std::vector<double> y = {1, 2, 3}, same = {1, 2, 3};
    CHECK(msle_loss(y, same) == 0.0);
    const std::vector<double> e1 = {std::exp(1.0) - 1}, zero = {0.0};
    CHECK(msle_loss(e1, zero) == doctest::Approx(1.0).epsilon(1e-15));
    const std::vector<double> neg = {-1.0};
    CHECK_THROWS_AS((void)msle_loss(neg, zero), Error);
    const auto g = msle_gradient(y, same);
    for (double v : g) CHECK(v == 0.0);
}

TEST_CASE("msle gradient against central differences") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.1, 50);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> y(5), yh(5);
        for (auto& v : y) v = u(rng);
        for (auto& v : yh) v = u(rng);
        const auto g = msle_gradient(y, yh);
        for (std::size_t i = 0; i < y.size(); ++i) {
            auto p = yh, m = yh;
            p[i] += 1e-6;
            m[i] -= 1e-6;
            const double fd = (msle_loss(y, p) - msle_loss(y, m)) / 2e-6;
            CHECK(std::abs(fd - g[i]) <= 1e-4 * std::max(std::abs(fd), std::abs(g[i])) + 1e-10);
        }
    }
}

TEST_CASE("binary cross-entropy") {
    CHECK(bce_loss(1, 40) < 1e-15);
    CHECK(bce_loss(1, 0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(std::isfinite(bce_loss(0, 800)));
    CHECK(bce_loss(0, 800) == doctest::Approx(800.0));
    for (double z : {-3.0, -0.2, 0.0, 0.7, 5.0})
        for (double label : {0.0, 1.0}) {
            const double fd = (bce_loss(label, z + 1e-6) - bce_loss(label, z - 1e-6)) / 2e-6;
            CHECK(std::abs(fd - bce_gradient(label, z)) < 1e-4 * std::max(1e-3, std::abs(fd)));
        }
}

TEST_CASE("mlp forward matches the straight-line reference") {
    std::mt19937_64 rng(9);
    const auto m = Mlp::make({5, 7, 3, 2}, rng);
    std::normal_distribution<double> n(0, 1);
    Matrix x(5, 4);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = n(rng);
    const Matrix y = m.forward(x);
    for (Eigen::Index c = 0; c < 4; ++c) CHECK((y.col(c) - ref_forward(m, x.col(c))).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(m.parameter_count() == 5 * 7 + 7 + 7 * 3 + 3 + 3 * 2 + 2);
}

TEST_CASE("single linear layer gradient is an outer product") {
    std::mt19937_64 rng(1);
    const auto m = Mlp::make({3, 2}, rng);
    Matrix x(3, 1);
    x << 1.0, -2.0, 0.5;
    Matrix go(2, 1);
    go << 0.3, -1.1;
    MlpTape tape;
    (void)forward(m, x, tape);
    auto grads = m.zeros_like();
    const Matrix gx = backward(m, tape, go, grads);
    const Matrix outer = go * x.transpose();
    CHECK((grads.layers[0].weight - outer).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((grads.layers[0].bias - go.col(0)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((gx - m.layers[0].weight.transpose() * go).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("mlp backward against central differences") {
    std::mt19937_64 rng(17);
    auto m = Mlp::make({4, 6, 1}, rng);
    Matrix x = Matrix::Random(4, 3);
    auto loss = [&](const Mlp& net) { return net.forward(x).sum(); };
    MlpTape tape;
    const Matrix y = forward(m, x, tape);
    auto grads = m.zeros_like();
    (void)backward(m, tape, Matrix::Ones(1, 3), grads);
    std::vector<double> analytic;
    for_each_block(std::as_const(grads), [&](const double* d, std::size_t n) { analytic.insert(analytic.end(), d, d + n); });
    std::size_t k = 0;
    for_each_block(m, [&](double* d, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i, ++k) {
            const double keep = d[i];
            d[i] = keep + 1e-6;
            const double lp = loss(m);
            d[i] = keep - 1e-6;
            const double lm = loss(m);
            d[i] = keep;
            const double fd = (lp - lm) / 2e-6;
            CHECK(std::abs(fd - analytic[k]) <= 1e-4 * std::max(1e-2, std::abs(fd)));
        }
    });
    CHECK(k == m.parameter_count());
}

TEST_CASE("gradient clipping") {
    std::vector<double> g = {3, 4};
    CHECK(clip_by_norm(g, 10) == 5.0);
    CHECK(g == std::vector<double>{3, 4});
    CHECK(clip_by_norm(g, 1) == 5.0);
    CHECK(g[0] == doctest::Approx(0.6));
    CHECK(g[1] == doctest::Approx(0.8));
}

TEST_CASE("adam first step moves each parameter by the learning rate") {
    Adam opt(3, AdamConfig{0.01});
    std::vector<double> p = {1, 1, 1};
    const std::vector<double> g = {2.0, -0.5, 1e-3};
    opt.step(p, g);
    CHECK(p[0] == doctest::Approx(0.99));
    CHECK(p[1] == doctest::Approx(1.01));
    CHECK(p[2] == doctest::Approx(0.99).epsilon(1e-4));
}

TEST_CASE("logistic is stable") {
    CHECK(logistic(0) == 0.5);
    CHECK(logistic(800) == 1.0);
    CHECK(logistic(-800) == 0.0);
}
