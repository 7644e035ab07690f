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

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "mcdd/pair_batch.hpp"

namespace mcdd {

class Rng;

/// Weights of the two-layer encoder f(x) = W2 relu(W1 x + b1) + b2. Also the
/// shape of its gradients.
struct EncoderWeights {
    Eigen::MatrixXd w1; // hidden x d
    Eigen::VectorXd b1; // hidden
    Eigen::MatrixXd w2; // out x hidden
    Eigen::VectorXd b2; // out

    std::size_t input_dim() const noexcept { return static_cast<std::size_t>(w1.cols()); }
    std::size_t hidden_dim() const noexcept { return static_cast<std::size_t>(w1.rows()); }
    std::size_t output_dim() const noexcept { return static_cast<std::size_t>(w2.rows()); }

    /// Total number of scalars.
    std::size_t size() const noexcept;

    /// w1, b1, w2, b2 concatenated, matrices row-major.
    std::vector<double> flatten() const;
    void assign_flat(std::span<const double> values);

    /// this += scale * other
    void axpy(double scale, const EncoderWeights& other);

    bool all_finite() const;

    static EncoderWeights zeros(std::size_t input_dim, std::size_t hidden, std::size_t output);
};

struct EncoderParams : EncoderWeights {
    double lipschitz_target = 1.0;

    /// Each layer uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
    static EncoderParams random_init(std::size_t input_dim, std::size_t hidden, std::size_t output,
                                     double lipschitz_target, Rng& rng);
    static EncoderParams zeros(std::size_t input_dim, std::size_t hidden, std::size_t output,
                               double lipschitz_target = 1.0);
};

/// Concept representation of a sample set.
struct Embedding {
    Eigen::VectorXd h;
};

Eigen::VectorXd forward(const EncoderParams& params, std::span<const double> x);
Eigen::VectorXd forward(const EncoderParams& params, const Eigen::VectorXd& x);

/// Mean of f over the columns of the sample set.
Embedding set_encode(const EncoderParams& params, const SampleSet& set);
Embedding set_encode(const EncoderParams& params, const Eigen::MatrixXd& points);

/// Frobenius norm of the input Jacobian W2 diag(1[W1 x + b1 > 0]) W1.
double input_jacobian_norm(const EncoderParams& params, const Eigen::VectorXd& x);

/// Contrastive part of the objective, given the pair distances, with its
/// derivatives. positive and weak hold n_sub * k values (j-major); strong
/// holds the strong-negative distances, which every sub-window's denominator
/// shares:
///   log sum_j [ sum_i e^{p_ji} / sum_i (e^{p_ji} + e^{wn_ji} + e^{sn_i}) ]
/// Evaluated in log-space, so large distances do not overflow.
struct InfoNceTerms {
    double value = 0.0;
    std::vector<double> d_positive;
    std::vector<double> d_weak;
    std::vector<double> d_strong;
};

InfoNceTerms info_nce(std::span<const double> positive, std::span<const double> weak,
                      std::span<const double> strong, std::size_t n_sub, std::size_t k);

struct LossResult {
    double loss = 0.0;
    double contrastive = 0.0;
    double penalty = 0.0;
    EncoderWeights grads;
    std::vector<double> positive_mcds;
    std::vector<double> weak_mcds;
    std::vector<double> strong_mcds;
};

/// Full objective: the contrastive term plus
/// lambda * sum_i (||df/dx (x_i)||_F - L)^2 over the columns of
/// penalty_points, with exact gradients for every weight. Throws
/// NumericalError when the loss is not finite.
LossResult loss_and_grads(const EncoderParams& params, const PairBatch& batch, double lambda,
                          const Eigen::MatrixXd& penalty_points);

// Checkpoints: a JSON document
//   {"format": "mcdd-encoder", "version": 1, "input_dim", "hidden_dim",
//    "output_dim", "lipschitz_target", "seed", "hyperparameters": {...},
//    "w1": [...], "b1": [...], "w2": [...], "b2": [...]}
// with matrices stored row-major. Doubles are printed with enough digits to
// round-trip exactly.
struct Checkpoint {
    EncoderParams params;
    std::uint64_t seed = 0;
    nlohmann::json hyperparameters = nlohmann::json::object();
};

nlohmann::json to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(const nlohmann::json& doc);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

} // namespace mcdd
