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
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include <json.hpp>

#include "mcdd/contrastive.hpp"
#include "mcdd/encoder.hpp"
#include "mcdd/rng.hpp"
#include "mcdd/stream.hpp"

namespace mcdd {

/// Euclidean distance between two concept representations.
double mcd(const Embedding& a, const Embedding& b);

struct DriftReport {
    std::size_t window_end_time = 0;
    double mcd_value = 0.0;
    double sigma = 0.0;
    bool drift = false;          // mcd_value > sigma, false while not ready
    bool threshold_ready = true;
};

nlohmann::json to_json(const DriftReport& report);

/// Compares fresh sample sets of the two newest sub-windows, taken at the same
/// positions within each. With no threshold yet the report is marked not
/// ready and never flags drift.
DriftReport detect_drift(const SlidingWindow& window, const EncoderParams& params,
                         const std::optional<ThresholdState>& threshold, std::size_t m, Rng& rng);

/// MCD between a sample set of the newest sub-window and the set at the same
/// positions of each preceding sub-window, j = 1..N_sub-1.
std::vector<double> heatmap_row(const SlidingWindow& window, const EncoderParams& params, std::size_t m, Rng& rng);

/// Heatmap over window positions: cells[c][j - 1] is the MCD between the
/// newest sub-window and sub-window j at column c.
struct HeatmapMatrix {
    std::size_t n_rows = 0; // N_sub - 1
    std::vector<std::size_t> window_end_times;
    std::vector<std::vector<double>> columns;

    void append(std::size_t window_end_time, std::vector<double> column);
};

/// CSV with a header "subwindow,<end time>,..." and one row per preceding
/// sub-window j.
void write_heatmap_csv(std::ostream& out, const HeatmapMatrix& heatmap);

struct DetectorConfig {
    TrainingHyperparams training;
    std::size_t hidden = 100;
    std::size_t output = 100;
    double alpha = 0.05;
    std::size_t history_windows = 20;
};

struct PhaseTimings {
    double sampling_s = 0.0;
    double training_s = 0.0;
    double inference_s = 0.0;
};

/// Online detector: for every window, detect with the current encoder and
/// threshold, then take one training step and refresh the threshold from the
/// positive-pair distances gathered during training.
class McdDriftDetector {
public:
    /// The positive-pair history keeps history_windows * k * n_sub values.
    McdDriftDetector(std::size_t input_dim, std::size_t n_sub, DetectorConfig config, std::uint64_t seed);

    /// Test-then-train on a warm window. When `heatmap` is non-null the
    /// diagnostic heatmap row is computed with the pre-update encoder as well.
    DriftReport process(const SlidingWindow& window, std::vector<double>* heatmap = nullptr,
                        PhaseTimings* timings = nullptr);

    const EncoderParams& params() const noexcept { return params_; }
    const std::optional<ThresholdState>& threshold() const noexcept { return threshold_; }
    const McdHistory& history() const noexcept { return history_; }
    const DetectorConfig& config() const noexcept { return config_; }

private:
    DetectorConfig config_;
    std::size_t n_sub_;
    EncoderParams params_;
    McdHistory history_;
    std::optional<ThresholdState> threshold_;
    Rng detect_rng_;
    Rng train_rng_;
};

} // namespace mcdd
