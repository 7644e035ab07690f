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

#include "mcdd/detector.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>

#include "mcdd/error.hpp"

namespace mcdd {

double mcd(const Embedding& a, const Embedding& b) {
    if (a.h.size() != b.h.size()) {
        throw ContractError("mcd: embedding dimensions differ");
    }
    return (a.h - b.h).norm();
}

nlohmann::json to_json(const DriftReport& report) {
    return {{"method", "mcd_dd"},
            {"window_end_time", report.window_end_time},
            {"mcd_value", report.mcd_value},
            {"sigma", report.sigma},
            {"drift", report.drift},
            {"threshold_ready", report.threshold_ready}};
}

DriftReport detect_drift(const SlidingWindow& window, const EncoderParams& params,
                         const std::optional<ThresholdState>& threshold, std::size_t m, Rng& rng) {
    const std::size_t n_sub = window.config().n_sub();
    const SampleSet newest = draw_sample_set(window.sub_window(n_sub), m, rng);
    const SampleSet previous = gather_sample_set(window.sub_window(n_sub - 1), newest.positions);

    DriftReport report;
    report.window_end_time = window.window_end_time();
    report.mcd_value = mcd(set_encode(params, newest), set_encode(params, previous));
    report.threshold_ready = threshold.has_value();
    if (threshold) {
        report.sigma = threshold->sigma;
        report.drift = report.mcd_value > threshold->sigma;
    }
    return report;
}

std::vector<double> heatmap_row(const SlidingWindow& window, const EncoderParams& params, std::size_t m, Rng& rng) {
    const std::size_t n_sub = window.config().n_sub();
    const SampleSet newest_set = draw_sample_set(window.sub_window(n_sub), m, rng);
    const Embedding newest = set_encode(params, newest_set);
    std::vector<double> row;
    row.reserve(n_sub - 1);
    for (std::size_t j = 1; j < n_sub; ++j) {
        row.push_back(mcd(newest, set_encode(params, gather_sample_set(window.sub_window(j), newest_set.positions))));
    }
    return row;
}

void HeatmapMatrix::append(std::size_t window_end_time, std::vector<double> column) {
    if (columns.empty() && n_rows == 0) {
        n_rows = column.size();
    }
    if (column.size() != n_rows) {
        throw ContractError("heatmap: column length does not match row count");
    }
    window_end_times.push_back(window_end_time);
    columns.push_back(std::move(column));
}

void write_heatmap_csv(std::ostream& out, const HeatmapMatrix& heatmap) {
    out << "subwindow";
    for (auto t : heatmap.window_end_times) {
        out << ',' << t;
    }
    out << '\n';
    const auto old_precision = out.precision(17);
    for (std::size_t r = 0; r < heatmap.n_rows; ++r) {
        out << (r + 1);
        for (const auto& col : heatmap.columns) {
            out << ',' << col[r];
        }
        out << '\n';
    }
    out.precision(old_precision);
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

McdDriftDetector::McdDriftDetector(std::size_t input_dim, std::size_t n_sub, DetectorConfig config,
                                   std::uint64_t seed)
    : config_(config),
      n_sub_(n_sub),
      history_(std::max<std::size_t>(1, config.history_windows * config.training.k * n_sub)),
      detect_rng_(Rng(seed).derive(1)),
      train_rng_(Rng(seed).derive(2)) {
    if (config_.history_windows == 0) {
        throw ContractError("detector: history must keep at least one window");
    }
    if (!(config_.alpha > 0.0 && config_.alpha < 1.0)) {
        throw ContractError("detector: alpha must be in (0, 1)");
    }
    Rng init_rng = Rng(seed).derive(0);
    params_ = EncoderParams::random_init(input_dim, config_.hidden, config_.output, config_.training.lipschitz,
                                         init_rng);
}

DriftReport McdDriftDetector::process(const SlidingWindow& window, std::vector<double>* heatmap,
                                      PhaseTimings* timings) {
    const auto& hyper = config_.training;
    hyper.validate(window.config().slide_size);
    if (window.config().n_sub() != n_sub_) {
        throw ContractError("detector: window has a different number of sub-windows than configured");
    }

    auto start = std::chrono::steady_clock::now();
    DriftReport report = detect_drift(window, params_, threshold_, hyper.m, detect_rng_);
    if (heatmap != nullptr) {
        *heatmap = heatmap_row(window, params_, hyper.m, detect_rng_);
    }
    const double inference = seconds_since(start);

    start = std::chrono::steady_clock::now();
    const PairBatch batch =
        build_pair_batch(window, hyper.m, hyper.k, hyper.eps_small, hyper.eps_big, train_rng_);
    const double sampling = seconds_since(start);

    start = std::chrono::steady_clock::now();
    TrainStep step = train_on_batch(params_, batch, hyper);
    params_ = std::move(step.params);
    history_.extend(step.positive_mcds);
    threshold_ = update_threshold(history_, config_.alpha);
    const double training = seconds_since(start);

    if (timings != nullptr) {
        *timings = {sampling, training, inference};
    }
    return report;
}

} // namespace mcdd
