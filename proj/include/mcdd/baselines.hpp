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
#include <functional>
#include <span>

#include <Eigen/Dense>

namespace mcdd {

class Rng;

namespace baselines {

struct TwoSampleDecision {
    double statistic = 0.0;
    double p_value = 1.0;
    bool reject = false; // p_value < alpha
};

/// sup_t |F_xs(t) - F_ys(t)| over the pooled sample points.
double ks_statistic(std::span<const double> xs, std::span<const double> ys);

/// Asymptotic two-sided Kolmogorov p-value Q(D sqrt(nm / (n + m))).
double ks_pvalue(double d, std::size_t n, std::size_t m);

/// Per-dimension KS tests with Bonferroni aggregation. Samples are d x n
/// matrices, one point per column. statistic is the largest per-dimension D,
/// p_value = min(1, d * min_p).
TwoSampleDecision ks_drift_decision(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double alpha);

double gaussian_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double bandwidth);

/// Unbiased MMD^2 with k(a, b) = exp(-|a - b|^2 / (2 bandwidth^2)). Needs at
/// least two points per sample.
double mmd2_unbiased(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double bandwidth);

/// Median pairwise Euclidean distance of the pooled sample; 1 if that is 0.
double median_heuristic_bandwidth(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

/// Statistic of a split of the pooled sample: `first` and `second` index
/// pooled points (x's columns first, then y's).
using SplitStatistic = std::function<double(std::span<const std::size_t> first, std::span<const std::size_t> second)>;
using TwoSampleStatistic = std::function<double(const Eigen::MatrixXd&, const Eigen::MatrixXd&)>;

/// (1 + #{permuted statistic >= observed}) / (n_perm + 1). Permutation p
/// shuffles with the p-th stream derived from one draw of `rng`.
double permutation_pvalue(std::size_t n_first, std::size_t n_second, const SplitStatistic& stat, std::size_t n_perm,
                          Rng& rng);
double permutation_pvalue(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const TwoSampleStatistic& stat,
                          std::size_t n_perm, Rng& rng);

/// Gaussian-kernel MMD permutation test. bandwidth <= 0 selects the median
/// heuristic.
TwoSampleDecision mmd_gk_decision(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double alpha,
                                  std::size_t n_perm, Rng& rng, double bandwidth = 0.0);

} // namespace baselines
} // namespace mcdd
