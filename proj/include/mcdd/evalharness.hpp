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
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mcdd/detector.hpp"
#include "mcdd/stream.hpp"
#include "mcdd/synth.hpp"

namespace mcdd::eval {

enum class Method { McdDd, Ks, MmdGk };

std::string_view to_string(Method method);
std::optional<Method> parse_method(std::string_view name);

/// One label per window position: true iff the newest sub-window
/// [p*S + W - S, p*S + W) intersects a drift region. Throws ContractError for
/// regions outside [0, stream_length).
std::vector<bool> ground_truth_labels(const std::vector<synth::DriftRegion>& regions, std::size_t stream_length,
                                      const StreamConfig& config);

/// Maximal runs of drift-labelled points become drift regions.
synth::LabeledStream from_csv(const CsvStream& csv);

struct PrequentialConfig {
    Method method = Method::McdDd;
    StreamConfig stream;
    DetectorConfig detector; // detector.alpha also drives the baselines
    std::size_t n_perm = 200;
    bool heatmap = false;
};

struct WindowStep {
    std::size_t window_index = 0;
    std::size_t window_end_time = 0;
    double statistic = 0.0;             // MCD for mcd_dd, KS D or MMD^2 otherwise
    std::optional<double> sigma;        // mcd_dd threshold used for the decision
    std::optional<double> p_value;      // baselines
    bool ready = true;
    bool drift = false;
    bool truth = false;
};

nlohmann::json to_json(const WindowStep& step, Method method);

struct PrequentialResult {
    Method method = Method::McdDd;
    std::vector<WindowStep> steps;
    std::vector<bool> predictions;
    std::vector<bool> truth;
    std::vector<double> sigma_trace; // mcd_dd: threshold after each window's update
    HeatmapMatrix heatmap;           // filled when requested (mcd_dd only)
    std::optional<EncoderParams> final_params; // mcd_dd encoder after the last window
};

/// Test-then-train over every window position. Exactly one prediction per
/// slide once the first window is full; a trailing partial slide is ignored.
PrequentialResult prequential_run(const synth::LabeledStream& stream, const PrequentialConfig& config,
                                  std::uint64_t seed, std::vector<PhaseTimings>* timings = nullptr);

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;

    std::size_t total() const noexcept { return tp + fp + fn + tn; }
};

struct MetricsReport {
    ConfusionCounts counts;
    double precision = 0.0;
    double f1 = 0.0;
    double mcc = 0.0;
};

/// Precision, F1 and MCC; each is 0 when its denominator is 0.
MetricsReport compute_metrics(const std::vector<bool>& predictions, const std::vector<bool>& truth);
MetricsReport compute_metrics(const ConfusionCounts& counts);

struct MeanStd {
    double mean = 0.0;
    double std = 0.0; // sample standard deviation, 0 for a single run
};

struct MetricsSummary {
    std::vector<MetricsReport> runs;
    MeanStd precision;
    MeanStd f1;
    MeanStd mcc;
};

/// Mean and standard deviation of the per-run metrics.
MetricsSummary summarize(std::vector<MetricsReport> runs);

nlohmann::json to_json(const MetricsReport& report);
nlohmann::json to_json(const MetricsSummary& summary);

/// CSV trace of one run: window_index,window_end_time,statistic,sigma,p_value,drift,truth.
void write_trace_csv(std::ostream& out, const PrequentialResult& result);

/// "window_index,sigma" for every window with a threshold.
void write_sigma_csv(std::ostream& out, const PrequentialResult& result);

} // namespace mcdd::eval
