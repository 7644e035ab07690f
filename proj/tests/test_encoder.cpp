// Copyright 2026 The mcdd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "mcdd/encoder.hpp"
#include "mcdd/error.hpp"
#include "mcdd/rng.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace mcdd {
namespace {

EncoderParams identity_params(std::size_t d) {
    EncoderParams p = EncoderParams::zeros(d, d, d);
    p.w1.setIdentity();
    p.w2.setIdentity();
    return p;
}

TEST(Forward, ZeroWeightsGiveBias) {
    EncoderParams p = EncoderParams::zeros(3, 4, 2);
    p.b2 << 1.5, -2.0;
    const Eigen::VectorXd y = forward(p, Eigen::VectorXd::Constant(3, 7.0));
    EXPECT_DOUBLE_EQ(y(0), 1.5);
    EXPECT_DOUBLE_EQ(y(1), -2.0);
}

TEST(Forward, IdentityOnPositiveInputs) {
    const Eigen::VectorXd x = Eigen::Vector3d(0.5, 2.0, 9.0);
    EXPECT_EQ(forward(identity_params(3), x), x);
}

TEST(Forward, MatchesLoopOracle) {
    Rng rng(17);
    for (int t = 0; t < 25; ++t) {
        const auto p = EncoderParams::random_init(4, 7, 3, 1.0, rng);
        std::vector<double> x(4);
        for (double& v : x) v = rng.normal(0.0, 3.0);
        const Eigen::VectorXd y = forward(p, std::span<const double>(x));
        const auto ref = oracle::forward(p, x);
        for (std::size_t o = 0; o < ref.size(); ++o) EXPECT_NEAR(y(o), ref[o], 1e-12);
    }
}

TEST(SetEncode, MeanOfForwardOutputs) {
    Rng rng(4);
    const auto p = EncoderParams::random_init(2, 5, 3, 1.0, rng);
    Eigen::MatrixXd one(2, 1);
    one << 0.3, -1.2;
    EXPECT_TRUE(set_encode(p, one).h.isApprox(forward(p, Eigen::VectorXd(one.col(0))), 1e-14));

    Eigen::MatrixXd same(2, 4);
    same.colwise() = one.col(0);
    EXPECT_TRUE(set_encode(p, same).h.isApprox(forward(p, Eigen::VectorXd(one.col(0))), 1e-12));

    Eigen::MatrixXd two(2, 2);
    two << 0.3, 2.0, -1.2, 0.7;
    const auto a = oracle::forward(p, {0.3, -1.2});
    const auto b = oracle::forward(p, {2.0, 0.7});
    const Eigen::VectorXd h = set_encode(p, two).h;
    for (Eigen::Index o = 0; o < h.size(); ++o) EXPECT_NEAR(h(o), 0.5 * (a[o] + b[o]), 1e-12);

    EXPECT_THROW(set_encode(p, Eigen::MatrixXd(2, 0)), ContractError);
}

TEST(Jacobian, HandComputedTwoByTwo) {
    EncoderParams p = EncoderParams::zeros(2, 2, 2);
    p.w1 << 1, 2, 3, 4;
    p.w2 << 0, 1, 1, 1;
    // All units active for x = (1, 1); W2 W1 = [[3, 4], [4, 6]].
    EXPECT_NEAR(input_jacobian_norm(p, Eigen::Vector2d(1, 1)), std::sqrt(9.0 + 16 + 16 + 36), 1e-12);
    EXPECT_DOUBLE_EQ(input_jacobian_norm(EncoderParams::zeros(2, 3, 2), Eigen::Vector2d(1, 1)), 0.0);
}

TEST(Jacobian, MatchesCentralDifferences) {
    Rng rng(8);
    int checked = 0;
    while (checked < 20) {
        const auto p = EncoderParams::random_init(3, 6, 4, 1.0, rng);
        std::vector<double> x(3);
        for (double& v : x) v = rng.normal();
        const auto pre_margin = [&] {
            double m = INFINITY;
            for (Eigen::Index i = 0; i < p.w1.rows(); ++i) {
                double s = p.b1(i);
                for (Eigen::Index j = 0; j < 3; ++j) s += p.w1(i, j) * x[j];
                m = std::min(m, std::abs(s));
            }
            return m;
        }();
        if (pre_margin < 1e-3) continue;
        const double h = 1e-6;
        double sq = 0.0;
        for (std::size_t j = 0; j < 3; ++j) {
            auto up = x, down = x;
            up[j] += h;
            down[j] -= h;
            const auto fu = oracle::forward(p, up), fd = oracle::forward(p, down);
            for (std::size_t o = 0; o < fu.size(); ++o) sq += std::pow((fu[o] - fd[o]) / (2 * h), 2);
        }
        const double fd_norm = std::sqrt(sq);
        const double an = input_jacobian_norm(p, Eigen::Map<const Eigen::VectorXd>(x.data(), 3));
        EXPECT_LT(std::abs(an - fd_norm) / std::max(fd_norm, 1e-12), 1e-5);
        EXPECT_NEAR(an, oracle::jacobian_norm(p, x), 1e-12);
        ++checked;
    }
}

TEST(InfoNce, AllZeroDistancesGiveZero) {
    const std::vector<double> pos(6, 0.0), weak(6, 0.0), strong(2, 0.0);
    // n_sub = 3, k = 2: log(3 * 2 / (2 + 2 + 2)) = 0.
    EXPECT_NEAR(info_nce(pos, weak, strong, 3, 2).value, 0.0, 1e-15);
}

TEST(InfoNce, ScalarExample) {
    const double l2 = std::log(2.0);
    const auto t = info_nce(std::vector<double>{0.0}, std::vector<double>{l2}, std::vector<double>{l2}, 1, 1);
    EXPECT_NEAR(t.value, -std::log(5.0), 1e-14);
}

TEST(InfoNce, MatchesOracleAndDerivatives) {
    Rng rng(12);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n_sub = 2 + trial % 3, k = 1 + trial % 4;
        std::vector<double> pos(n_sub * k), weak(n_sub * k), strong(3);
        for (auto* v : {&pos, &weak, &strong})
            for (double& x : *v) x = 5.0 * rng.uniform();
        const auto t = info_nce(pos, weak, strong, n_sub, k);
        EXPECT_NEAR(t.value, oracle::contrastive(pos, weak, strong, n_sub, k), 1e-12);
        const double h = 1e-6;
        for (std::size_t i = 0; i < strong.size(); ++i) {
            auto up = strong, down = strong;
            up[i] += h;
            down[i] -= h;
            const double num = (oracle::contrastive(pos, weak, up, n_sub, k) -
                                oracle::contrastive(pos, weak, down, n_sub, k)) / (2 * h);
            EXPECT_NEAR(t.d_strong[i], num, 1e-7);
        }
        for (std::size_t i = 0; i < pos.size(); ++i) {
            auto up = pos, down = pos;
            up[i] += h;
            down[i] -= h;
            const double num = (oracle::contrastive(up, weak, strong, n_sub, k) -
                                oracle::contrastive(down, weak, strong, n_sub, k)) / (2 * h);
            EXPECT_NEAR(t.d_positive[i], num, 1e-7);
        }
    }
}

TEST(Loss, MatchesOracleValue) {
    Rng rng(31);
    for (int t = 0; t < 10; ++t) {
        const auto g = testing::random_grad_instance(rng);
        const auto r = loss_and_grads(g.params, g.batch, g.lambda, g.penalty_points);
        EXPECT_NEAR(r.loss, oracle::loss(g.params, g.batch, g.lambda, g.penalty_points), 1e-10);
        EXPECT_EQ(r.positive_mcds.size(), g.batch.positives.size());
    }
}

TEST(Loss, GradientsMatchFiniteDifferences) {
    Rng rng(2024);
    for (int t = 0; t < 20; ++t) {
        const auto g = testing::random_grad_instance(rng);
        const auto r = loss_and_grads(g.params, g.batch, g.lambda, g.penalty_points);
        EXPECT_LT(testing::max_gradient_rel_error(g, r.grads), 1e-4) << "instance " << t;
    }
}

TEST(Loss, NonFiniteObjectiveIsReported) {
    Rng rng(3);
    auto g = testing::random_grad_instance(rng);
    g.params.w2 *= 1e300;
    g.params.w2 *= 1e300;
    EXPECT_THROW(loss_and_grads(g.params, g.batch, g.lambda, g.penalty_points), NumericalError);
}

TEST(Checkpoint, RoundTripsExactly) {
    Rng rng(77);
    Checkpoint c{EncoderParams::random_init(5, 8, 3, 1.5, rng), 77, {{"m", 30}}};
    const auto path = std::filesystem::temp_directory_path() / "mcdd_checkpoint_test.json";
    save_checkpoint(path, c);
    const Checkpoint back = load_checkpoint(path);
    std::filesystem::remove(path);
    EXPECT_EQ(back.params.flatten(), c.params.flatten());
    EXPECT_EQ(back.params.lipschitz_target, 1.5);
    EXPECT_EQ(back.seed, 77u);
    EXPECT_EQ(back.hyperparameters, c.hyperparameters);
}

TEST(Checkpoint, RejectsMalformedDocuments) {
    nlohmann::json doc = to_json(Checkpoint{EncoderParams::zeros(2, 2, 2), 1, {}});
    doc["w1"] = {1.0, 2.0};
    EXPECT_THROW(checkpoint_from_json(doc), SchemaError);
    EXPECT_THROW(checkpoint_from_json(nlohmann::json::object()), SchemaError);
}

} // namespace
} // namespace mcdd
