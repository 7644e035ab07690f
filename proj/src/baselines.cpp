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

#include "mcdd/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mcdd/error.hpp"
#include "mcdd/rng.hpp"

namespace mcdd::baselines {

double ks_statistic(std::span<const double> xs, std::span<const double> ys) {
    if (xs.empty() || ys.empty()) {
        throw ContractError("ks_statistic: both samples must be non-empty");
    }
    std::vector<double> a(xs.begin(), xs.end());
    std::vector<double> b(ys.begin(), ys.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        // Step past every copy of the next pooled value before comparing.
        const double t = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == t) ++i;
        while (j < b.size() && b[j] == t) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_pvalue(double d, std::size_t n, std::size_t m) {
    if (n == 0 || m == 0 || !(d >= 0.0 && d <= 1.0)) {
        throw ContractError("ks_pvalue: need n, m >= 1 and D in [0, 1]");
    }
    const double nn = static_cast<double>(n);
    const double mm = static_cast<double>(m);
    const double lambda = d * std::sqrt(nn * mm / (nn + mm));
    if (lambda == 0.0) {
        return 1.0;
    }
    constexpr double kPi = 3.14159265358979323846;
    constexpr double kTol = 1e-12;
    double p = 0.0;
    if (lambda < 1.18) {
        // The alternating series converges slowly here; use the dual (theta
        // function) form of the Kolmogorov CDF instead.
        double cdf = 0.0;
        for (int j = 1; j < 1000; ++j) {
            const double odd = 2.0 * j - 1.0;
            const double term = std::exp(-odd * odd * kPi * kPi / (8.0 * lambda * lambda));
            cdf += term;
            if (term < kTol) break;
        }
        cdf *= std::sqrt(2.0 * kPi) / lambda;
        p = 1.0 - cdf;
    } else {
        double sign = 1.0;
        for (int j = 1; j < 1000; ++j) {
            const double term = std::exp(-2.0 * j * j * lambda * lambda);
            p += sign * term;
            sign = -sign;
            if (term < kTol) break;
        }
        p *= 2.0;
    }
    return std::clamp(p, 0.0, 1.0);
}

TwoSampleDecision ks_drift_decision(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double alpha) {
    if (x.rows() != y.rows() || x.rows() == 0) {
        throw ContractError("ks_drift_decision: samples must share a positive dimension");
    }
    const auto dim = static_cast<std::size_t>(x.rows());
    TwoSampleDecision out;
    double min_p = 1.0;
    std::vector<double> xs(static_cast<std::size_t>(x.cols()));
    std::vector<double> ys(static_cast<std::size_t>(y.cols()));
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        Eigen::Map<Eigen::RowVectorXd>(xs.data(), x.cols()) = x.row(r);
        Eigen::Map<Eigen::RowVectorXd>(ys.data(), y.cols()) = y.row(r);
        const double d = ks_statistic(xs, ys);
        out.statistic = std::max(out.statistic, d);
        min_p = std::min(min_p, ks_pvalue(d, xs.size(), ys.size()));
    }
    out.p_value = std::min(1.0, static_cast<double>(dim) * min_p);
    out.reject = out.p_value < alpha;
    return out;
}

double gaussian_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double bandwidth) {
    return std::exp(-(a - b).squaredNorm() / (2.0 * bandwidth * bandwidth));
}

namespace {

// Pooled Gaussian kernel matrix, x's columns first.
Eigen::MatrixXd pooled_kernel(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double bandwidth) {
    const Eigen::Index n = x.cols() + y.cols();
    Eigen::MatrixXd pooled(x.rows(), n);
    pooled << x, y;
    const Eigen::VectorXd sq = pooled.colwise().squaredNorm().transpose();
    Eigen::MatrixXd dist2 = -2.0 * pooled.transpose() * pooled;
    dist2.colwise() += sq;
    dist2.rowwise() += sq.transpose();
    const double scale = -1.0 / (2.0 * bandwidth * bandwidth);
    Eigen::MatrixXd k = (dist2.cwiseMax(0.0) * scale).array().exp().matrix();
    k.diagonal().setOnes();
    return k;
}

// Unbiased MMD^2 of the split given by labels (0 = first sample).
double mmd2_from_labels(const Eigen::MatrixXd& k, const std::vector<unsigned char>& label, std::size_t n_first) {
    const auto n = static_cast<std::size_t>(k.rows());
    const std::size_t n_second = n - n_first;
    double sums[3] = {0.0, 0.0, 0.0}; // first-first, cross, second-second
    for (std::size_t j = 1; j < n; ++j) {
        const double* col = k.data() + j * n;
        const unsigned lj = label[j];
        for (std::size_t i = 0; i < j; ++i) {
            sums[label[i] + lj] += col[i];
        }
    }
    const double a = static_cast<double>(n_first);
    const double b = static_cast<double>(n_second);
    return 2.0 * sums[0] / (a * (a - 1.0)) + 2.0 * sums[2] / (b * (b - 1.0)) - 2.0 * sums[1] / (a * b);
}

void check_mmd_sizes(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double bandwidth) {
    if (x.cols() < 2 || y.cols() < 2) {
        throw ContractError("mmd2_unbiased: each sample needs at least two points");
    }
    if (x.rows() != y.rows()) {
        throw ContractError("mmd2_unbiased: samples differ in dimension");
    }
    if (!(bandwidth > 0.0)) {
        throw ContractError("mmd2_unbiased: bandwidth must be positive");
    }
}

} // namespace

double mmd2_unbiased(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double bandwidth) {
    check_mmd_sizes(x, y, bandwidth);
    const Eigen::Index n = x.cols();
    const Eigen::Index m = y.cols();
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            sxx += gaussian_kernel(x.col(i), x.col(j), bandwidth);
        }
        for (Eigen::Index j = 0; j < m; ++j) {
            sxy += gaussian_kernel(x.col(i), y.col(j), bandwidth);
        }
    }
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = i + 1; j < m; ++j) {
            syy += gaussian_kernel(y.col(i), y.col(j), bandwidth);
        }
    }
    const double dn = static_cast<double>(n);
    const double dm = static_cast<double>(m);
    return 2.0 * sxx / (dn * (dn - 1.0)) + 2.0 * syy / (dm * (dm - 1.0)) - 2.0 * sxy / (dn * dm);
}

double median_heuristic_bandwidth(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    Eigen::MatrixXd pooled(x.rows(), x.cols() + y.cols());
    pooled << x, y;
    std::vector<double> d;
    const Eigen::Index n = pooled.cols();
    d.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            d.push_back((pooled.col(i) - pooled.col(j)).norm());
        }
    }
    if (d.empty()) {
        return 1.0;
    }
    const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
    std::nth_element(d.begin(), mid, d.end());
    double median = *mid;
    if (d.size() % 2 == 0) {
        median = 0.5 * (median + *std::max_element(d.begin(), mid));
    }
    return median > 0.0 ? median : 1.0;
}

double permutation_pvalue(std::size_t n_first, std::size_t n_second, const SplitStatistic& stat, std::size_t n_perm,
                          Rng& rng) {
    if (n_perm == 0) {
        throw ContractError("permutation_pvalue: n_perm must be positive");
    }
    const std::size_t n = n_first + n_second;
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const auto split = [n_first](const std::vector<std::size_t>& v) {
        return std::pair{std::span<const std::size_t>(v.data(), n_first),
                         std::span<const std::size_t>(v.data() + n_first, v.size() - n_first)};
    };
    const auto [obs_a, obs_b] = split(idx);
    const double observed = stat(obs_a, obs_b);

    const Rng base(rng.next_u64());
    std::size_t at_least = 0;
    std::vector<std::size_t> perm(n);
    for (std::size_t p = 0; p < n_perm; ++p) {
        Rng prng = base.derive(p);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t i = n; i > 1; --i) {
            std::swap(perm[i - 1], perm[static_cast<std::size_t>(prng.uniform_index(i))]);
        }
        const auto [a, b] = split(perm);
        if (stat(a, b) >= observed) {
            ++at_least;
        }
    }
    return static_cast<double>(1 + at_least) / static_cast<double>(n_perm + 1);
}

double permutation_pvalue(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const TwoSampleStatistic& stat,
                          std::size_t n_perm, Rng& rng) {
    if (x.rows() != y.rows()) {
        throw ContractError("permutation_pvalue: samples differ in dimension");
    }
    Eigen::MatrixXd pooled(x.rows(), x.cols() + y.cols());
    pooled << x, y;
    const auto gather = [&pooled](std::span<const std::size_t> idx) {
        Eigen::MatrixXd out(pooled.rows(), static_cast<Eigen::Index>(idx.size()));
        for (std::size_t c = 0; c < idx.size(); ++c) {
            out.col(static_cast<Eigen::Index>(c)) = pooled.col(static_cast<Eigen::Index>(idx[c]));
        }
        return out;
    };
    return permutation_pvalue(
        static_cast<std::size_t>(x.cols()), static_cast<std::size_t>(y.cols()),
        [&](std::span<const std::size_t> a, std::span<const std::size_t> b) { return stat(gather(a), gather(b)); },
        n_perm, rng);
}

TwoSampleDecision mmd_gk_decision(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double alpha,
                                  std::size_t n_perm, Rng& rng, double bandwidth) {
    if (bandwidth <= 0.0) {
        bandwidth = median_heuristic_bandwidth(x, y);
    }
    check_mmd_sizes(x, y, bandwidth);
    const Eigen::MatrixXd k = pooled_kernel(x, y, bandwidth);
    const auto n_first = static_cast<std::size_t>(x.cols());
    std::vector<unsigned char> label(static_cast<std::size_t>(k.rows()));
    const auto stat = [&](std::span<const std::size_t> a, std::span<const std::size_t> b) {
        for (auto i : a) label[i] = 0;
        for (auto i : b) label[i] = 1;
        return mmd2_from_labels(k, label, n_first);
    };
    TwoSampleDecision out;
    std::vector<std::size_t> first(n_first);
    std::vector<std::size_t> second(static_cast<std::size_t>(y.cols()));
    std::iota(first.begin(), first.end(), std::size_t{0});
    std::iota(second.begin(), second.end(), n_first);
    out.statistic = stat(first, second);
    out.p_value = permutation_pvalue(n_first, second.size(), stat, n_perm, rng);
    out.reject = out.p_value < alpha;
    return out;
}

} // namespace mcdd::baselines
