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

#include "mcdd/contrastive.hpp"

#include <algorithm>
#include <cmath>

#include "mcdd/error.hpp"
#include "mcdd/rng.hpp"

namespace mcdd {

void TrainingHyperparams::validate(std::size_t slide_size) const {
    if (m == 0 || m > slide_size) {
        throw ContractError("hyperparameters: m must be in [1, S]");
    }
    if (k == 0) {
        throw ContractError("hyperparameters: k must be positive");
    }
    if (!(lambda >= 0.0) || !(lipschitz > 0.0) || !(learning_rate >= 0.0)) {
        throw ContractError("hyperparameters: lambda, L and learning rate out of range");
    }
    if (!(eps_small >= 0.0) || !(eps_big >= 0.0)) {
        throw ContractError("hyperparameters: noise scales must be non-negative");
    }
}

SampleSet draw_sample_set(const SubWindow& sub, std::size_t m, Rng& rng) {
    const std::size_t s = sub.points.size();
    if (m == 0 || m > s) {
        throw ContractError("draw_sample_set: m = " + std::to_string(m) + " not in [1, " + std::to_string(s) + "]");
    }
    return gather_sample_set(sub, rng.sample_without_replacement(s, m));
}

SampleSet gather_sample_set(const SubWindow& sub, std::vector<std::size_t> positions) {
    if (positions.empty()) {
        throw ContractError("gather_sample_set: no positions");
    }
    SampleSet set;
    set.source_subwindow = sub.index;
    set.positions = std::move(positions);
    const auto d = static_cast<Eigen::Index>(sub.points.front().dim());
    set.points.resize(d, static_cast<Eigen::Index>(set.positions.size()));
    for (std::size_t c = 0; c < set.positions.size(); ++c) {
        if (set.positions[c] >= sub.points.size()) {
            throw ContractError("gather_sample_set: position out of range");
        }
        const auto& f = sub.points[set.positions[c]].features;
        set.points.col(static_cast<Eigen::Index>(c)) = Eigen::Map<const Eigen::VectorXd>(f.data(), d);
    }
    return set;
}

namespace {

void add_noise(SampleSet& set, double sd, Rng& rng) {
    if (sd == 0.0) {
        return;
    }
    for (Eigen::Index c = 0; c < set.points.cols(); ++c) {
        for (Eigen::Index r = 0; r < set.points.rows(); ++r) {
            set.points(r, c) += sd * rng.normal();
        }
    }
}

SetPair draw_pair(const SubWindow& a, const SubWindow& b, std::size_t m, double noise_sd, Rng rng) {
    SetPair pair{draw_sample_set(a, m, rng), draw_sample_set(b, m, rng)};
    add_noise(pair.second, noise_sd, rng);
    return pair;
}

} // namespace

PairBatch build_pair_batch(const SlidingWindow& window, std::size_t m, std::size_t k, double eps_small,
                           double eps_big, Rng& rng) {
    if (k == 0) {
        throw ContractError("build_pair_batch: k must be positive");
    }
    const auto subs = window.partition();
    const std::size_t n_sub = subs.size();
    const Rng base(rng.next_u64());

    PairBatch batch;
    batch.n_sub = n_sub;
    batch.k = k;
    batch.positives.reserve(n_sub * k);
    batch.weak_negatives.reserve(n_sub * k);
    batch.strong_negatives.reserve(k);
    std::uint64_t stream = 0;
    for (std::size_t j = 0; j < n_sub; ++j) {
        for (std::size_t i = 0; i < k; ++i) {
            batch.positives.push_back(draw_pair(subs[j], subs[j], m, 0.0, base.derive(stream++)));
        }
    }
    for (std::size_t j = 0; j < n_sub; ++j) {
        for (std::size_t i = 0; i < k; ++i) {
            batch.weak_negatives.push_back(draw_pair(subs[j], subs[j], m, eps_small, base.derive(stream++)));
        }
    }
    for (std::size_t i = 0; i < k; ++i) {
        batch.strong_negatives.push_back(draw_pair(subs[n_sub - 1], subs[0], m, eps_big, base.derive(stream++)));
    }
    return batch;
}

const Eigen::MatrixXd& penalty_points(const PairBatch& batch) {
    if (batch.positives.size() != batch.n_sub * batch.k || batch.positives.empty()) {
        throw ContractError("penalty_points: batch has no positive pairs");
    }
    return batch.positives[(batch.n_sub - 1) * batch.k].first.points;
}

TrainStep train_on_batch(const EncoderParams& params, const PairBatch& batch, const TrainingHyperparams& hyper) {
    LossResult lr = loss_and_grads(params, batch, hyper.lambda, penalty_points(batch));
    TrainStep step;
    step.params = params;
    step.params.axpy(-hyper.learning_rate, lr.grads);
    step.positive_mcds = std::move(lr.positive_mcds);
    step.loss = lr.loss;
    return step;
}

TrainStep train_window(const EncoderParams& params, const SlidingWindow& window, const TrainingHyperparams& hyper,
                       Rng& rng) {
    hyper.validate(window.config().slide_size);
    const PairBatch batch = build_pair_batch(window, hyper.m, hyper.k, hyper.eps_small, hyper.eps_big, rng);
    return train_on_batch(params, batch, hyper);
}

McdHistory::McdHistory(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) {
        throw ContractError("McdHistory: capacity must be positive");
    }
}

void McdHistory::push(double value) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw ContractError("McdHistory: values must be finite and non-negative");
    }
    if (values_.size() == capacity_) {
        values_.pop_front();
    }
    values_.push_back(value);
}

void McdHistory::extend(std::span<const double> values) {
    for (double v : values) {
        push(v);
    }
}

ThresholdState update_threshold(std::span<const double> history, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ContractError("update_threshold: alpha must be in (0, 1)");
    }
    if (history.empty()) {
        throw NotReadyError("update_threshold: no positive-pair history yet");
    }
    std::vector<double> sorted(history.begin(), history.end());
    const auto n = static_cast<double>(sorted.size());
    // Guard against (1 - alpha) * n landing a hair above an integer.
    auto rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * n - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank - 1), sorted.end());
    return {sorted[rank - 1], alpha};
}

ThresholdState update_threshold(const McdHistory& history, double alpha) {
    const std::vector<double> values(history.values().begin(), history.values().end());
    return update_threshold(values, alpha);
}

} // namespace mcdd
