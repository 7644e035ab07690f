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
#include <optional>
#include <string>
#include <string_view>

#include "mcdd/detector.hpp"
#include "mcdd/evalharness.hpp"
#include "mcdd/synth.hpp"

namespace mcdd {

// Run configuration document: one "key = value" pair per line, '#' starts a
// comment, blank lines are ignored. Keys are those written by save_config;
// unknown or repeated keys are errors.
//
//   task = GM_Sud          # or: csv = path/to/stream.csv
//   seed = 7
//   method = mcd_dd        # mcd_dd | ks | mmd_gk
//   window = 3000          # 0: 10% of the stream length
//   slide = 300            # 0: window / 10
//   m = 30
//   ...
struct RunConfig {
    std::optional<synth::TaskId> task;
    std::optional<std::string> csv;
    std::uint64_t seed = 0;
    eval::Method method = eval::Method::McdDd;
    std::size_t window = 0;
    std::size_t slide = 0;
    std::size_t m = 30;
    std::size_t k = 10;
    double lambda = 1.0;
    double lipschitz = 1.0;
    double learning_rate = 0.005;
    double eps_small = 1.0;
    double eps_big = 10.0;
    double alpha = 0.05;
    std::size_t hidden = 100;
    std::size_t output = 100;
    std::size_t history_windows = 20;
    std::size_t n_perm = 200;
    std::size_t runs = 20;
    std::string output_dir = ".";
    bool heatmap = false;

    bool operator==(const RunConfig&) const = default;

    /// Sets one key from its text form. Throws ConfigError naming the key.
    void set(std::string_view key, std::string_view value);

    /// Throws ConfigError naming the offending field.
    void validate() const;

    /// Window geometry for a stream of `length` points, filling defaults.
    StreamConfig stream_config(std::size_t length) const;

    DetectorConfig detector_config() const;
    eval::PrequentialConfig prequential_config(std::size_t length) const;
};

/// Defaults, with output_dir taken from MCDD_OUTPUT_DIR when set.
RunConfig default_run_config();

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);
std::string save_config(const RunConfig& config);

} // namespace mcdd
