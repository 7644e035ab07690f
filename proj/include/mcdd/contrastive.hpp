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

#include <cstddef>
#include <deque>
#include <span>
#include <vector>

#include "mcdd/encoder.hpp"
#include "mcdd/pair_batch.hpp"
#include "mcdd/stream.hpp"

namespace mcdd {

class Rng;

struct TrainingHyperparams {
    std::size_t m = 30;        // sample set size
    std::size_t k = 10;        // pairs per sub-window and category
    double lambda = 1.0;       // gradient-penalty weight
    double lipschitz = 1.0;    // target L
    double learning_rate = 0.005;
    double eps_small = 1.0;    // weak-negative noise sd
    double eps_big = 10.0;     // strong-negative noise sd

    void validate(std::size_t slide_size) const;
    bool operator==(const TrainingHyperparams&) const = default;
};

/// m distinct points of `sub`, chosen uniformly without replacement.
SampleSet draw_sample_set(const SubWindow& sub, std::size_t m, Rng& rng);

/// The points of `sub` at the given positions, in that order.
SampleSet gather_sample_set(const SubWindow& sub, std::vector<std::size_t> positions);

/// Positive and weak-negative pairs for every sub-window and k strong-negative
/// pairs between the newest and oldest sub-windows. Noise is added to the
/// second member of each negative pair only. Each pair draws from its own
/// derived generator, so the batch does not depend on construction order.
PairBatch build_pair_batch(const SlidingWindow& window, std::size_t m, std::size_t k, double eps_small,
                           double eps_big, Rng& rng);

/// Points on which the gradient penalty is evaluated: the first positive
/// sample set of the newest sub-window (noise-free).
const Eigen::MatrixXd& penalty_points(const PairBatch& batch);

struct TrainStep {
    EncoderParams params;
    std::vector<double> positive_mcds; // pre-update distances, j-major
    double loss = 0.0;
};

/// One full-batch gradient step on `batch`.
TrainStep train_on_batch(const EncoderParams& params, const PairBatch& batch, const TrainingHyperparams& hyper);

/// Builds a batch from the window and takes one gradient step on it.
TrainStep train_window(const EncoderParams& params, const SlidingWindow& window, const TrainingHyperparams& hyper,
                       Rng& rng);

/// Rolling history of positive-pair distances.
class McdHistory {
public:
    explicit McdHistory(std::size_t capacity);

    void push(double value);
    void extend(std::span<const double> values);

    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    const std::deque<double>& values() const noexcept { return values_; }

private:
    std::size_t capacity_;
    std::deque<double> values_;
};

struct ThresholdState {
    double sigma = 0.0;
    double alpha = 0.05;
};

/// sigma = ceil((1 - alpha) * n)-th smallest history value. Throws
/// NotReadyError on an empty history.
ThresholdState update_threshold(const McdHistory& history, double alpha);
ThresholdState update_threshold(std::span<const double> history, double alpha);

} // namespace mcdd
