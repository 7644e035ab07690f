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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcdd/stream.hpp"

namespace mcdd::synth {

enum class TaskId {
    GM_Sud,
    GM_Rec,
    GM_Inc,
    GM_Grad,
    GamLog_Sud,
    LogGamWei_Sud,
    GamGM_SudGrad,
};

inline constexpr std::size_t kTaskLength = 30000;

std::string_view to_string(TaskId task);
std::optional<TaskId> parse_task(std::string_view name);
const std::vector<TaskId>& all_tasks();

/// 5 for the Gaussian-mixture tasks and GamLog_Sud, 20 otherwise.
std::size_t task_dimension(TaskId task);

struct TaskSpec {
    TaskId task = TaskId::GM_Sud;
    std::uint64_t seed = 0;
    // Streams shorter than the full 30000 points are a prefix of the full
    // stream (same seed, same points).
    std::size_t length = kTaskLength;
};

enum class DriftKind { Sudden, Reoccurring, Incremental, Gradual };

std::string_view to_string(DriftKind kind);

/// Ground-truth drift over [start, end). A drift point t is [t, t + 1).
struct DriftRegion {
    std::size_t start = 0;
    std::size_t end = 0;
    DriftKind kind = DriftKind::Sudden;

    bool operator==(const DriftRegion&) const = default;
};

/// Law a point was drawn from; every coordinate of a point shares it.
/// Gamma is Gamma(1.5, 20); GammaNarrow is Gamma(2, 10).
enum class Law : std::uint8_t { Normal10, Normal50, Gamma, GammaNarrow, Lognormal, Weibull };

struct LabeledStream {
    std::vector<DataPoint> points;
    std::vector<DriftRegion> drift_regions;
    std::vector<Law> laws; // one per point

    /// Per-point label: true inside any drift region.
    std::vector<bool> point_labels() const;
};

/// Weight p of the N(20, 10^2) component at instance t. Throws
/// NotApplicableError for tasks (or phases) without a Gaussian mixture and
/// ContractError for t outside [0, 30000).
double mixture_weight_schedule(TaskId task, std::size_t t);

std::vector<DriftRegion> drift_regions(TaskId task);

LabeledStream generate_task(const TaskSpec& spec);

} // namespace mcdd::synth
