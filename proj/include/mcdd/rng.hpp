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
#include <random>
#include <vector>

namespace mcdd {

/// Seeded random source used throughout the library.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. All distributions are implemented here on top of the raw 64-bit
/// output rather than with <random> distribution classes, whose algorithms are
/// implementation-defined. Streams are therefore bit-identical across
/// compilers and platforms for a given seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 bits of precision.
    double uniform();

    /// Uniform on (0, 1).
    double uniform_open();

    /// Uniform integer in [0, n). Unbiased (rejection on the top range).
    std::uint64_t uniform_index(std::uint64_t n);

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal via the Marsaglia polar method.
    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }

    /// Gamma with shape k and scale theta (mean k * theta). Marsaglia-Tsang.
    double gamma(double shape, double scale);

    /// Log-normal with log-space mean mu and log-space standard deviation sigma.
    double lognormal(double mu, double sigma);

    /// Weibull with the given shape and scale, by inversion.
    double weibull(double shape, double scale);

    /// m distinct indices from [0, n) in draw order (partial Fisher-Yates).
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t m);

    /// Independent generator for sub-stream `stream`, a pure function of
    /// (seed, stream). Used to make parallel work order-independent.
    Rng derive(std::uint64_t stream) const;

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

} // namespace mcdd
