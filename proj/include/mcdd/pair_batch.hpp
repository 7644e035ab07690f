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
#include <vector>

#include <Eigen/Dense>

namespace mcdd {

/// m points drawn without replacement from one sub-window. Columns of
/// `points` are the (possibly noise-augmented) feature vectors, in the order
/// of `positions`.
struct SampleSet {
    std::size_t source_subwindow = 0; // 1-based j
    std::vector<std::size_t> positions;
    Eigen::MatrixXd points; // d x m

    std::size_t size() const noexcept { return static_cast<std::size_t>(points.cols()); }
};

struct SetPair {
    SampleSet first;
    SampleSet second;
};

/// Contrastive batch for one window. positives and weak_negatives hold k pairs
/// per sub-window, ordered j-major: entry (j - 1) * k + i. strong_negatives
/// hold k pairs between sub-window N_sub and sub-window 1.
struct PairBatch {
    std::size_t n_sub = 0;
    std::size_t k = 0;
    std::vector<SetPair> positives;
    std::vector<SetPair> weak_negatives;
    std::vector<SetPair> strong_negatives;
};

} // namespace mcdd
