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
#include <deque>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace mcdd {

struct DataPoint {
    std::vector<double> features;
    std::size_t time_index = 0;

    std::size_t dim() const noexcept { return features.size(); }
    bool operator==(const DataPoint&) const = default;
};

/// Count-based sliding window geometry: W points split into W / S
/// non-overlapping sub-windows of S points.
struct StreamConfig {
    std::size_t window_size = 0;
    std::size_t slide_size = 0;

    std::size_t n_sub() const noexcept { return slide_size == 0 ? 0 : window_size / slide_size; }

    /// Throws ContractError unless S > 0, S divides W and W / S >= 2.
    void validate() const;

    /// Number of complete window positions in a stream of `length` points,
    /// floor((T - W) / S) + 1, or 0 when T < W.
    std::size_t window_count(std::size_t length) const noexcept;

    bool operator==(const StreamConfig&) const = default;
};

struct SubWindow {
    std::vector<DataPoint> points;
    std::size_t index = 0; // 1..N_sub, oldest first

    std::size_t first_time() const { return points.front().time_index; }
    std::size_t end_time() const { return points.back().time_index + 1; }
};

/// Points parsed from a stream CSV. `drift` is empty when the file has no
/// drift column.
struct CsvStream {
    std::vector<DataPoint> points;
    std::vector<bool> drift;
    std::size_t dim = 0;

    bool has_labels() const noexcept { return !drift.empty(); }
};

/// Reads the stream CSV format: header "f0,...,f{d-1}[,drift]", one point per
/// row. Throws ParseError (with the line number) on malformed rows and
/// SchemaError on header or dimension problems.
CsvStream ingest_csv(const std::filesystem::path& path);
CsvStream ingest_csv(std::istream& in);

/// Writes the same format. `drift` may be empty (no label column) or have one
/// entry per point.
void write_csv(std::ostream& out, std::span<const DataPoint> points, const std::vector<bool>& drift);

/// Sliding window over a point stream, holding the N_sub most recent
/// sub-windows. Sub-window 1 is the oldest.
class SlidingWindow {
public:
    explicit SlidingWindow(StreamConfig config);

    const StreamConfig& config() const noexcept { return config_; }

    /// Appends one slide of exactly S points whose time indices continue the
    /// stream. Once warm, the oldest sub-window is evicted.
    void advance(std::span<const DataPoint> slide);

    bool warm() const noexcept { return ring_.size() == config_.n_sub(); }

    /// One past the time index of the newest point (= points consumed).
    std::size_t window_end_time() const noexcept { return end_time_; }

    /// Sub-windows ordered j = 1..N_sub. Throws NotWarmError while cold.
    std::vector<SubWindow> partition() const;

    /// Sub-window j (1-based) without copying the rest. Throws NotWarmError.
    const SubWindow& sub_window(std::size_t j) const;

    std::size_t dim() const noexcept { return dim_; }

private:
    StreamConfig config_;
    std::deque<SubWindow> ring_;
    std::size_t end_time_ = 0;
    std::size_t dim_ = 0;
};

/// Functional form of SlidingWindow::advance.
SlidingWindow advance(SlidingWindow state, std::span<const DataPoint> slide);

} // namespace mcdd
