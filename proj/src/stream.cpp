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

#include "mcdd/stream.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "mcdd/error.hpp"

namespace mcdd {

void StreamConfig::validate() const {
    if (window_size == 0 || slide_size == 0) {
        throw ContractError("stream config: window and slide sizes must be positive");
    }
    if (window_size % slide_size != 0) {
        throw ContractError("stream config: slide size " + std::to_string(slide_size) +
                            " does not divide window size " + std::to_string(window_size));
    }
    if (n_sub() < 2) {
        throw ContractError("stream config: window must hold at least two sub-windows");
    }
}

std::size_t StreamConfig::window_count(std::size_t length) const noexcept {
    if (slide_size == 0 || length < window_size) {
        return 0;
    }
    return (length - window_size) / slide_size + 1;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

bool parse_double(std::string_view text, double& value) {
    text = trim(text);
    if (text.empty()) {
        return false;
    }
    // from_chars rejects a leading '+', which is valid decimal notation.
    if (text.front() == '+') {
        text.remove_prefix(1);
    }
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    return ec == std::errc() && ptr == end;
}

} // namespace

CsvStream ingest_csv(std::istream& in) {
    CsvStream result;
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) {
        throw SchemaError("stream csv: missing header row");
    }
    ++line_no;
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
        static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF) {
        line.erase(0, 3);
    }
    const auto header = split_fields(line);
    bool has_drift = false;
    std::size_t dim = header.size();
    if (!header.empty() && trim(header.back()) == "drift") {
        has_drift = true;
        --dim;
    }
    if (dim == 0) {
        throw SchemaError("stream csv: header declares no feature columns");
    }
    for (std::size_t c = 0; c < dim; ++c) {
        if (trim(header[c]) == "drift") {
            throw SchemaError("stream csv: 'drift' must be the last column");
        }
    }
    result.dim = dim;

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split_fields(line);
        const std::size_t expected = dim + (has_drift ? 1 : 0);
        if (fields.size() != expected) {
            throw SchemaError("stream csv: line " + std::to_string(line_no) + " has " +
                              std::to_string(fields.size()) + " fields, expected " +
                              std::to_string(expected));
        }
        DataPoint p;
        p.time_index = result.points.size();
        p.features.resize(dim);
        for (std::size_t c = 0; c < dim; ++c) {
            if (!parse_double(fields[c], p.features[c]) || !std::isfinite(p.features[c])) {
                throw ParseError("stream csv: non-numeric value '" + std::string(trim(fields[c])) +
                                     "' in column " + std::to_string(c),
                                 line_no);
            }
        }
        if (has_drift) {
            const auto flag = trim(fields[dim]);
            if (flag == "1") {
                result.drift.push_back(true);
            } else if (flag == "0") {
                result.drift.push_back(false);
            } else {
                throw ParseError("stream csv: drift label must be 0 or 1", line_no);
            }
        }
        result.points.push_back(std::move(p));
    }
    return result;
}

CsvStream ingest_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ContractError("stream csv: cannot open " + path.string());
    }
    return ingest_csv(in);
}

void write_csv(std::ostream& out, std::span<const DataPoint> points, const std::vector<bool>& drift) {
    if (!drift.empty() && drift.size() != points.size()) {
        throw ContractError("write_csv: drift labels do not match point count");
    }
    const std::size_t dim = points.empty() ? 0 : points.front().dim();
    for (std::size_t c = 0; c < dim; ++c) {
        out << (c ? "," : "") << 'f' << c;
    }
    if (!drift.empty()) {
        out << ",drift";
    }
    out << '\n';
    char buf[32];
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        if (p.dim() != dim) {
            throw SchemaError("write_csv: inconsistent point dimension");
        }
        for (std::size_t c = 0; c < dim; ++c) {
            // Shortest representation that round-trips exactly.
            const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, p.features[c]);
            if (c) {
                out << ',';
            }
            out.write(buf, ptr - buf);
        }
        if (!drift.empty()) {
            out << ',' << (drift[i] ? '1' : '0');
        }
        out << '\n';
    }
}

SlidingWindow::SlidingWindow(StreamConfig config) : config_(config) {
    config_.validate();
}

void SlidingWindow::advance(std::span<const DataPoint> slide) {
    if (slide.size() != config_.slide_size) {
        throw ContractError("advance: slide has " + std::to_string(slide.size()) + " points, expected " +
                            std::to_string(config_.slide_size));
    }
    if (dim_ == 0) {
        dim_ = slide.front().dim();
    }
    for (std::size_t i = 0; i < slide.size(); ++i) {
        if (slide[i].time_index != end_time_ + i) {
            throw ContractError("advance: time indices do not continue the stream");
        }
        if (slide[i].dim() != dim_) {
            throw ContractError("advance: point dimension changed within the stream");
        }
    }
    SubWindow sub;
    sub.points.assign(slide.begin(), slide.end());
    if (warm()) {
        ring_.pop_front();
    }
    ring_.push_back(std::move(sub));
    for (std::size_t j = 0; j < ring_.size(); ++j) {
        ring_[j].index = j + 1;
    }
    end_time_ += slide.size();
}

std::vector<SubWindow> SlidingWindow::partition() const {
    if (!warm()) {
        throw NotWarmError("partition: window holds " + std::to_string(ring_.size() * config_.slide_size) +
                           " of " + std::to_string(config_.window_size) + " points");
    }
    return {ring_.begin(), ring_.end()};
}

const SubWindow& SlidingWindow::sub_window(std::size_t j) const {
    if (!warm()) {
        throw NotWarmError("sub_window: window is not warm");
    }
    if (j < 1 || j > ring_.size()) {
        throw ContractError("sub_window: index out of range");
    }
    return ring_[j - 1];
}

SlidingWindow advance(SlidingWindow state, std::span<const DataPoint> slide) {
    state.advance(slide);
    return state;
}

} // namespace mcdd
