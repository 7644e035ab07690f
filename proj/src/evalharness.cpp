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

#include "mcdd/evalharness.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "mcdd/baselines.hpp"
#include "mcdd/error.hpp"
#include "mcdd/rng.hpp"

namespace mcdd::eval {

std::string_view to_string(Method method) {
    switch (method) {
    case Method::McdDd: return "mcd_dd";
    case Method::Ks: return "ks";
    case Method::MmdGk: return "mmd_gk";
    }
    return "?";
}

std::optional<Method> parse_method(std::string_view name) {
    for (auto m : {Method::McdDd, Method::Ks, Method::MmdGk}) {
        if (to_string(m) == name) {
            return m;
        }
    }
    return std::nullopt;
}

std::vector<bool> ground_truth_labels(const std::vector<synth::DriftRegion>& regions, std::size_t stream_length,
                                      const StreamConfig& config) {
    config.validate();
    for (const auto& r : regions) {
        if (r.start >= r.end || r.end > stream_length) {
            throw ContractError("ground_truth_labels: drift region [" + std::to_string(r.start) + ", " +
                                std::to_string(r.end) + ") outside the stream");
        }
    }
    const std::size_t windows = config.window_count(stream_length);
    std::vector<bool> labels(windows, false);
    for (std::size_t p = 0; p < windows; ++p) {
        const std::size_t end = p * config.slide_size + config.window_size;
        const std::size_t start = end - config.slide_size;
        labels[p] = std::any_of(regions.begin(), regions.end(),
                                [&](const auto& r) { return r.start < end && start < r.end; });
    }
    return labels;
}

synth::LabeledStream from_csv(const CsvStream& csv) {
    synth::LabeledStream out;
    out.points = csv.points;
    for (std::size_t t = 0; t < csv.drift.size();) {
        if (!csv.drift[t]) {
            ++t;
            continue;
        }
        const std::size_t start = t;
        while (t < csv.drift.size() && csv.drift[t]) ++t;
        out.drift_regions.push_back({start, t, synth::DriftKind::Sudden});
    }
    return out;
}

namespace {

Eigen::MatrixXd as_matrix(const SubWindow& sub) {
    const auto d = static_cast<Eigen::Index>(sub.points.front().dim());
    Eigen::MatrixXd out(d, static_cast<Eigen::Index>(sub.points.size()));
    for (std::size_t c = 0; c < sub.points.size(); ++c) {
        out.col(static_cast<Eigen::Index>(c)) = Eigen::Map<const Eigen::VectorXd>(sub.points[c].features.data(), d);
    }
    return out;
}

} // namespace

PrequentialResult prequential_run(const synth::LabeledStream& stream, const PrequentialConfig& config,
                                  std::uint64_t seed, std::vector<PhaseTimings>* timings) {
    config.stream.validate();
    const std::size_t length = stream.points.size();
    if (length <= config.stream.window_size) {
        throw ContractError("prequential_run: stream of " + std::to_string(length) +
                            " points is not longer than the window");
    }
    PrequentialResult result;
    result.method = config.method;
    result.truth = ground_truth_labels(stream.drift_regions, length, config.stream);

    SlidingWindow window(config.stream);
    const std::size_t dim = stream.points.front().dim();
    std::optional<McdDriftDetector> detector;
    if (config.method == Method::McdDd) {
        detector.emplace(dim, config.stream.n_sub(), config.detector, seed);
    }
    Rng baseline_rng(Rng(seed).derive(7).next_u64());
    const std::size_t s = config.stream.slide_size;
    const std::size_t n_sub = config.stream.n_sub();

    std::size_t p = 0;
    for (std::size_t begin = 0; begin + s <= length; begin += s) {
        window.advance(std::span<const DataPoint>(stream.points).subspan(begin, s));
        if (!window.warm()) {
            continue;
        }
        WindowStep step;
        step.window_index = p;
        step.window_end_time = window.window_end_time();
        step.truth = result.truth[p];
        switch (config.method) {
        case Method::McdDd: {
            std::vector<double> row;
            PhaseTimings phase;
            const DriftReport report = detector->process(window, config.heatmap ? &row : nullptr, &phase);
            step.statistic = report.mcd_value;
            step.ready = report.threshold_ready;
            if (report.threshold_ready) {
                step.sigma = report.sigma;
            }
            step.drift = report.drift;
            result.sigma_trace.push_back(detector->threshold()->sigma);
            if (config.heatmap) {
                result.heatmap.append(step.window_end_time, std::move(row));
            }
            if (timings != nullptr) {
                timings->push_back(phase);
            }
            break;
        }
        case Method::Ks:
        case Method::MmdGk: {
            const Eigen::MatrixXd newest = as_matrix(window.sub_window(n_sub));
            const Eigen::MatrixXd previous = as_matrix(window.sub_window(n_sub - 1));
            const auto decision =
                config.method == Method::Ks
                    ? baselines::ks_drift_decision(newest, previous, config.detector.alpha)
                    : baselines::mmd_gk_decision(newest, previous, config.detector.alpha, config.n_perm, baseline_rng);
            step.statistic = decision.statistic;
            step.p_value = decision.p_value;
            step.drift = decision.reject;
            break;
        }
        }
        result.predictions.push_back(step.drift);
        result.steps.push_back(step);
        ++p;
    }
    if (detector) {
        result.final_params = detector->params();
    }
    return result;
}

MetricsReport compute_metrics(const ConfusionCounts& c) {
    MetricsReport r;
    r.counts = c;
    const double tp = static_cast<double>(c.tp);
    const double fp = static_cast<double>(c.fp);
    const double fn = static_cast<double>(c.fn);
    const double tn = static_cast<double>(c.tn);
    r.precision = (c.tp + c.fp) == 0 ? 0.0 : tp / (tp + fp);
    const double recall = (c.tp + c.fn) == 0 ? 0.0 : tp / (tp + fn);
    r.f1 = (r.precision + recall) == 0.0 ? 0.0 : 2.0 * r.precision * recall / (r.precision + recall);
    const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
    r.mcc = denom == 0.0 ? 0.0 : (tp * tn - fp * fn) / std::sqrt(denom);
    return r;
}

MetricsReport compute_metrics(const std::vector<bool>& predictions, const std::vector<bool>& truth) {
    if (predictions.size() != truth.size()) {
        throw ContractError("compute_metrics: " + std::to_string(predictions.size()) + " predictions vs " +
                            std::to_string(truth.size()) + " labels");
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i]) {
            truth[i] ? ++c.tp : ++c.fp;
        } else {
            truth[i] ? ++c.fn : ++c.tn;
        }
    }
    return compute_metrics(c);
}

namespace {

MeanStd mean_std(const std::vector<double>& v) {
    MeanStd out;
    if (v.empty()) {
        return out;
    }
    double sum = 0.0;
    for (double x : v) sum += x;
    out.mean = sum / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - out.mean) * (x - out.mean);
        out.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return out;
}

} // namespace

MetricsSummary summarize(std::vector<MetricsReport> runs) {
    MetricsSummary s;
    std::vector<double> precision;
    std::vector<double> f1;
    std::vector<double> mcc;
    for (const auto& r : runs) {
        precision.push_back(r.precision);
        f1.push_back(r.f1);
        mcc.push_back(r.mcc);
    }
    s.precision = mean_std(precision);
    s.f1 = mean_std(f1);
    s.mcc = mean_std(mcc);
    s.runs = std::move(runs);
    return s;
}

nlohmann::json to_json(const MetricsReport& r) {
    return {{"tp", r.counts.tp}, {"fp", r.counts.fp}, {"fn", r.counts.fn}, {"tn", r.counts.tn},
            {"precision", r.precision}, {"f1", r.f1}, {"mcc", r.mcc}};
}

nlohmann::json to_json(const MetricsSummary& s) {
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& r : s.runs) {
        runs.push_back(to_json(r));
    }
    const auto ms = [](const MeanStd& v) { return nlohmann::json{{"mean", v.mean}, {"std", v.std}}; };
    return {{"runs", runs}, {"precision", ms(s.precision)}, {"f1", ms(s.f1)}, {"mcc", ms(s.mcc)}};
}

nlohmann::json to_json(const WindowStep& step, Method method) {
    nlohmann::json j;
    j["method"] = to_string(method);
    j["window_index"] = step.window_index;
    j["window_end_time"] = step.window_end_time;
    if (method == Method::McdDd) {
        j["mcd_value"] = step.statistic;
        j["sigma"] = step.sigma ? nlohmann::json(*step.sigma) : nlohmann::json(nullptr);
        j["threshold_ready"] = step.ready;
    } else {
        j["statistic"] = step.statistic;
        j["p_value"] = step.p_value ? nlohmann::json(*step.p_value) : nlohmann::json(nullptr);
    }
    j["drift"] = step.drift;
    return j;
}

namespace {

void write_optional(std::ostream& out, const std::optional<double>& v) {
    if (v) {
        out << *v;
    }
}

} // namespace

void write_trace_csv(std::ostream& out, const PrequentialResult& result) {
    const auto old_precision = out.precision(17);
    out << "window_index,window_end_time,statistic,sigma,p_value,drift,truth\n";
    for (const auto& s : result.steps) {
        out << s.window_index << ',' << s.window_end_time << ',' << s.statistic << ',';
        write_optional(out, s.sigma);
        out << ',';
        write_optional(out, s.p_value);
        out << ',' << (s.drift ? 1 : 0) << ',' << (s.truth ? 1 : 0) << '\n';
    }
    out.precision(old_precision);
}

void write_sigma_csv(std::ostream& out, const PrequentialResult& result) {
    const auto old_precision = out.precision(17);
    out << "window_index,sigma\n";
    for (std::size_t i = 0; i < result.sigma_trace.size(); ++i) {
        out << i << ',' << result.sigma_trace[i] << '\n';
    }
    out.precision(old_precision);
}

} // namespace mcdd::eval
