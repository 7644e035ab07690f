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

#include "mcdd/theory.hpp"

#include <cmath>

#include "mcdd/error.hpp"
#include "mcdd/rng.hpp"

namespace mcdd::theory {

double std_normal_quantile(double q) {
    if (!(q > 0.0 && q < 1.0)) {
        throw DomainError("std_normal_quantile: q must lie in (0, 1)");
    }
    const double r0 = q - 0.5;
    if (std::fabs(r0) <= 0.425) {
        const double r = 0.180625 - r0 * r0;
        return r0 *
               (((((((2509.0809287301226727 * r + 33430.575583588128105) * r + 67265.770927008700853) * r +
                    45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
                 133.14166789178437745) * r + 3.387132872796366608) /
               (((((((5226.495278852545925 * r + 28729.085735721942674) * r + 39307.89580009271061) * r +
                    21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
                 42.313330701600911252) * r + 1.0);
    }
    double r = r0 < 0.0 ? q : 1.0 - q;
    r = std::sqrt(-std::log(r));
    double z = 0.0;
    if (r <= 5.0) {
        r -= 1.6;
        z = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
                 1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
              4.6303378461565452959) * r + 1.42343711074968357734) /
            (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
                 0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
              2.05319162663775882187) * r + 1.0);
    } else {
        r -= 5.0;
        z = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
                 0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
              5.4637849111641143699) * r + 6.6579046435011037772) /
            (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
                 7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
              0.59983220655588793769) * r + 1.0);
    }
    return r0 < 0.0 ? -z : z;
}

double std_normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

double mcd_bound(const BoundInputs& in) {
    if (!(in.alpha > 0.0 && in.alpha <= 1.0)) {
        throw DomainError("mcd_bound: alpha must lie in (0, 1]");
    }
    if (in.n == 0) {
        throw DomainError("mcd_bound: n must be positive");
    }
    if (!(in.lipschitz >= 0.0) || !(in.data_sigma >= 0.0)) {
        throw DomainError("mcd_bound: L and data_sigma must be non-negative");
    }
    const double z = std_normal_quantile(1.0 - in.alpha / 2.0);
    return z * std::sqrt(2.0 / static_cast<double>(in.n)) * in.lipschitz * in.data_sigma;
}

double ScalarDistribution::sample(Rng& rng) const {
    switch (kind) {
    case Kind::Normal: return rng.normal(mean, sd);
    case Kind::Uniform: {
        const double half_width = sd * std::sqrt(3.0);
        return mean + half_width * (2.0 * rng.uniform() - 1.0);
    }
    }
    return mean;
}

double null_rejection_rate(const LinearMap& f, const ScalarDistribution& dist, std::size_t n, double alpha,
                           std::size_t trials, Rng& rng) {
    if (trials < 1000) {
        throw ContractError("null_rejection_rate: at least 1000 trials are required");
    }
    const double bound = mcd_bound({alpha, n, f.lipschitz(), dist.sd});
    const Rng base(rng.next_u64());
    std::size_t rejections = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        Rng trial_rng = base.derive(t);
        double sum_x = 0.0;
        double sum_y = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum_x += f.slope * dist.sample(trial_rng);
        }
        for (std::size_t i = 0; i < n; ++i) {
            sum_y += f.slope * dist.sample(trial_rng);
        }
        const double stat = std::fabs(sum_x - sum_y) / static_cast<double>(n);
        if (stat > bound) {
            ++rejections;
        }
    }
    return static_cast<double>(rejections) / static_cast<double>(trials);
}

} // namespace mcdd::theory
