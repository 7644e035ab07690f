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

#include "mcdd/synth.hpp"

#include <array>
#include <cmath>

#include "mcdd/error.hpp"
#include "mcdd/rng.hpp"

namespace mcdd::synth {
namespace {

constexpr double kMean = 20.0;
constexpr double kNarrowSd = 10.0;
constexpr double kWideSd = 50.0;
constexpr double kLow = 0.2;
constexpr double kHigh = 0.8;

// Gamma(1.5, 20) and the lognormal / Weibull laws of the complex tasks.
constexpr double kGammaShape = 1.5;
constexpr double kGammaScale = 20.0;
const double kLognormalMu = std::log(30.0) - 0.5;
constexpr double kLognormalSigma = 0.5;
constexpr double kWeibullShape = 1.5;
constexpr double kWeibullScale = 20.0;
// Pre-drift law of GamGM_SudGrad.
constexpr double kGamGmShape = 2.0;
constexpr double kGamGmScale = 10.0;
constexpr std::size_t kGamGmSwitch = 11000;

struct Interval {
    std::size_t start;
    std::size_t end;
};

// [start, end) intervals with p = 0.8; the rest of the stream has p = 0.2.
constexpr std::array<Interval, 3> kGradHigh{{{10000, 11000}, {12001, 15000}, {18000, 21000}}};
// The gradual phase of GamGM_SudGrad reuses the GM_Grad alternation shifted
// 4000 instances later, so it starts after the sudden switch at 11000.
constexpr std::array<Interval, 3> kSudGradHigh{{{14000, 15000}, {16001, 19000}, {22000, 25000}}};

double ramp(std::size_t t, std::size_t start, std::size_t end, double from, double to) {
    const double frac = static_cast<double>(t - start) / static_cast<double>(end - start);
    return from + (to - from) * frac;
}

template <std::size_t N>
double alternating(const std::array<Interval, N>& high, std::size_t t) {
    for (const auto& iv : high) {
        if (t >= iv.start && t < iv.end) {
            return kHigh;
        }
    }
    return kLow;
}

template <std::size_t N>
void push_switch_points(std::vector<DriftRegion>& out, const std::array<Interval, N>& high, DriftKind kind) {
    for (const auto& iv : high) {
        out.push_back({iv.start, iv.start + 1, kind});
        out.push_back({iv.end, iv.end + 1, kind});
    }
}

DataPoint fill(std::size_t t, std::size_t dim, Rng& rng, Law law) {
    DataPoint p;
    p.time_index = t;
    p.features.resize(dim);
    for (auto& v : p.features) {
        switch (law) {
        case Law::Normal10: v = rng.normal(kMean, kNarrowSd); break;
        case Law::Normal50: v = rng.normal(kMean, kWideSd); break;
        case Law::Gamma: v = rng.gamma(kGammaShape, kGammaScale); break;
        case Law::GammaNarrow: v = rng.gamma(kGamGmShape, kGamGmScale); break;
        case Law::Lognormal: v = rng.lognormal(kLognormalMu, kLognormalSigma); break;
        case Law::Weibull: v = rng.weibull(kWeibullShape, kWeibullScale); break;
        }
    }
    return p;
}

} // namespace

std::string_view to_string(TaskId task) {
    switch (task) {
    case TaskId::GM_Sud: return "GM_Sud";
    case TaskId::GM_Rec: return "GM_Rec";
    case TaskId::GM_Inc: return "GM_Inc";
    case TaskId::GM_Grad: return "GM_Grad";
    case TaskId::GamLog_Sud: return "GamLog_Sud";
    case TaskId::LogGamWei_Sud: return "LogGamWei_Sud";
    case TaskId::GamGM_SudGrad: return "GamGM_SudGrad";
    }
    return "?";
}

const std::vector<TaskId>& all_tasks() {
    static const std::vector<TaskId> tasks{TaskId::GM_Sud,     TaskId::GM_Rec,        TaskId::GM_Inc,
                                           TaskId::GM_Grad,    TaskId::GamLog_Sud,    TaskId::LogGamWei_Sud,
                                           TaskId::GamGM_SudGrad};
    return tasks;
}

std::optional<TaskId> parse_task(std::string_view name) {
    for (auto task : all_tasks()) {
        if (to_string(task) == name) {
            return task;
        }
    }
    return std::nullopt;
}

std::string_view to_string(DriftKind kind) {
    switch (kind) {
    case DriftKind::Sudden: return "sudden";
    case DriftKind::Reoccurring: return "reoccurring";
    case DriftKind::Incremental: return "incremental";
    case DriftKind::Gradual: return "gradual";
    }
    return "?";
}

std::size_t task_dimension(TaskId task) {
    switch (task) {
    case TaskId::LogGamWei_Sud:
    case TaskId::GamGM_SudGrad: return 20;
    default: return 5;
    }
}

std::vector<bool> LabeledStream::point_labels() const {
    std::vector<bool> labels(points.size(), false);
    for (const auto& r : drift_regions) {
        for (std::size_t t = r.start; t < r.end && t < labels.size(); ++t) {
            labels[t] = true;
        }
    }
    return labels;
}

double mixture_weight_schedule(TaskId task, std::size_t t) {
    if (t >= kTaskLength) {
        throw ContractError("mixture_weight_schedule: instance index out of range");
    }
    switch (task) {
    case TaskId::GM_Sud: return t < 21000 ? kLow : kHigh;
    case TaskId::GM_Rec: return (t >= 15000 && t < 25000) ? kLow : kHigh;
    case TaskId::GM_Inc:
        if (t < 12000) return kLow;
        if (t <= 12600) return ramp(t, 12000, 12600, kLow, kHigh);
        if (t < 18000) return kHigh;
        if (t <= 19200) return ramp(t, 18000, 19200, kHigh, kLow);
        if (t < 24000) return kLow;
        if (t <= 25200) return ramp(t, 24000, 25200, kLow, kHigh);
        return kHigh;
    case TaskId::GM_Grad: return alternating(kGradHigh, t);
    case TaskId::GamGM_SudGrad:
        if (t < kGamGmSwitch) {
            throw NotApplicableError("mixture_weight_schedule: GamGM_SudGrad is Gamma-distributed before 11000");
        }
        return alternating(kSudGradHigh, t);
    case TaskId::GamLog_Sud:
    case TaskId::LogGamWei_Sud: break;
    }
    throw NotApplicableError("mixture_weight_schedule: task " + std::string(to_string(task)) +
                             " has no mixture weight");
}

std::vector<DriftRegion> drift_regions(TaskId task) {
    std::vector<DriftRegion> out;
    switch (task) {
    case TaskId::GM_Sud: out.push_back({21000, 21001, DriftKind::Sudden}); break;
    case TaskId::GM_Rec:
        out.push_back({15000, 15001, DriftKind::Reoccurring});
        out.push_back({25000, 25001, DriftKind::Reoccurring});
        break;
    case TaskId::GM_Inc:
        out.push_back({12000, 12600, DriftKind::Incremental});
        out.push_back({18000, 19200, DriftKind::Incremental});
        out.push_back({24000, 25200, DriftKind::Incremental});
        break;
    case TaskId::GM_Grad: push_switch_points(out, kGradHigh, DriftKind::Gradual); break;
    case TaskId::GamLog_Sud: out.push_back({21000, 21001, DriftKind::Sudden}); break;
    case TaskId::LogGamWei_Sud:
        out.push_back({15000, 15001, DriftKind::Sudden});
        out.push_back({24000, 24001, DriftKind::Sudden});
        break;
    case TaskId::GamGM_SudGrad:
        out.push_back({kGamGmSwitch, kGamGmSwitch + 1, DriftKind::Sudden});
        push_switch_points(out, kSudGradHigh, DriftKind::Gradual);
        break;
    }
    return out;
}

LabeledStream generate_task(const TaskSpec& spec) {
    if (spec.length == 0 || spec.length > kTaskLength) {
        throw ContractError("generate_task: length must be in [1, 30000]");
    }
    const std::size_t dim = task_dimension(spec.task);
    Rng rng(spec.seed);
    LabeledStream out;
    out.points.reserve(spec.length);
    out.laws.reserve(spec.length);

    for (std::size_t t = 0; t < spec.length; ++t) {
        Law law = Law::Normal10;
        switch (spec.task) {
        case TaskId::GamLog_Sud: law = t < 21000 ? Law::Gamma : Law::Lognormal; break;
        case TaskId::LogGamWei_Sud:
            law = t < 15000 ? Law::Lognormal : (t < 24000 ? Law::Gamma : Law::Weibull);
            break;
        case TaskId::GamGM_SudGrad:
            if (t < kGamGmSwitch) {
                law = Law::GammaNarrow;
                break;
            }
            [[fallthrough]];
        default: law = rng.bernoulli(mixture_weight_schedule(spec.task, t)) ? Law::Normal10 : Law::Normal50;
        }
        out.points.push_back(fill(t, dim, rng, law));
        out.laws.push_back(law);
    }
    for (const auto& r : drift_regions(spec.task)) {
        if (r.start < spec.length) {
            out.drift_regions.push_back({r.start, std::min(r.end, spec.length), r.kind});
        }
    }
    return out;
}

} // namespace mcdd::synth
