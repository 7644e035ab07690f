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

namespace mcdd {

class Rng;

namespace theory {

/// Inverse of the standard normal CDF (Wichura's AS241, PPND16). Absolute
/// error well below 1e-8 on (0, 1). Throws DomainError outside (0, 1).
double std_normal_quantile(double q);

double std_normal_cdf(double z);

/// Inputs of the analytic same-distribution bound on |mean f(X) - mean f(Y)|.
/// data_sigma is the standard deviation of the data, not the drift threshold.
struct BoundInputs {
    double alpha = 0.05;
    std::size_t n = 1;
    double lipschitz = 1.0;
    double data_sigma = 1.0;
};

/// z_{1 - alpha/2} * sqrt(2 / n) * L * data_sigma. alpha = 1 gives 0.
double mcd_bound(const BoundInputs& inputs);

/// Scalar map f(x) = slope * x; its Lipschitz constant is |slope|.
struct LinearMap {
    double slope = 1.0;
    double lipschitz() const noexcept { return slope < 0 ? -slope : slope; }
};

struct ScalarDistribution {
    enum class Kind { Normal, Uniform };
    Kind kind = Kind::Normal;
    double mean = 0.0;
    double sd = 1.0;

    double sample(Rng& rng) const;
};

/// Fraction of `trials` in which two i.i.d. sets of size n from `dist` give
/// |mean f(X) - mean f(Y)| above mcd_bound. Trial t draws from rng-derived
/// stream t, so the result does not depend on evaluation order.
double null_rejection_rate(const LinearMap& f, const ScalarDistribution& dist, std::size_t n, double alpha,
                           std::size_t trials, Rng& rng);

} // namespace theory
} // namespace mcdd
