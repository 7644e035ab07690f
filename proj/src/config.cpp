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

#include "mcdd/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "mcdd/error.hpp"

namespace mcdd {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
    throw ConfigError("config: invalid value '" + std::string(value) + "' for '" + std::string(key) + "'");
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
    T out{};
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end) {
        bad_value(key, value);
    }
    return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    bad_value(key, value);
}

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace

void RunConfig::set(std::string_view key, std::string_view value) {
    value = trim(value);
    if (key == "task") {
        task = synth::parse_task(value);
        if (!task) bad_value(key, value);
    } else if (key == "csv") {
        if (value.empty()) bad_value(key, value);
        csv = std::string(value);
    } else if (key == "seed") {
        seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "method") {
        const auto parsed = eval::parse_method(value);
        if (!parsed) bad_value(key, value);
        method = *parsed;
    } else if (key == "window") {
        window = parse_number<std::size_t>(key, value);
    } else if (key == "slide") {
        slide = parse_number<std::size_t>(key, value);
    } else if (key == "m") {
        m = parse_number<std::size_t>(key, value);
    } else if (key == "k") {
        k = parse_number<std::size_t>(key, value);
    } else if (key == "lambda") {
        lambda = parse_number<double>(key, value);
    } else if (key == "lipschitz") {
        lipschitz = parse_number<double>(key, value);
    } else if (key == "lr") {
        learning_rate = parse_number<double>(key, value);
    } else if (key == "eps_small") {
        eps_small = parse_number<double>(key, value);
    } else if (key == "eps_big") {
        eps_big = parse_number<double>(key, value);
    } else if (key == "alpha") {
        alpha = parse_number<double>(key, value);
    } else if (key == "hidden") {
        hidden = parse_number<std::size_t>(key, value);
    } else if (key == "output") {
        output = parse_number<std::size_t>(key, value);
    } else if (key == "history_windows") {
        history_windows = parse_number<std::size_t>(key, value);
    } else if (key == "n_perm") {
        n_perm = parse_number<std::size_t>(key, value);
    } else if (key == "runs") {
        runs = parse_number<std::size_t>(key, value);
    } else if (key == "output_dir") {
        output_dir = std::string(value);
    } else if (key == "heatmap") {
        heatmap = parse_bool(key, value);
    } else {
        throw ConfigError("config: unknown key '" + std::string(key) + "'");
    }
}

void RunConfig::validate() const {
    const auto fail = [](const std::string& field, const std::string& why) {
        throw ConfigError("config: " + field + ": " + why);
    };
    if (task.has_value() == csv.has_value()) {
        fail("task/csv", "exactly one stream source is required");
    }
    if (window != 0 && slide != 0) {
        if (window % slide != 0) fail("slide", "must divide window");
        if (window / slide < 2) fail("window", "must hold at least two sub-windows");
    }
    if (window != 0 && slide == 0 && (window % 10 != 0 || window < 20)) {
        fail("window", "must be a multiple of 10 when slide is left at its default");
    }
    if (slide != 0 && window == 0) fail("window", "must be set when slide is set");
    if (m == 0) fail("m", "must be positive");
    if (slide != 0 && m > slide) fail("m", "exceeds the slide size");
    if (k == 0) fail("k", "must be positive");
    if (!(lambda >= 0.0)) fail("lambda", "must be non-negative");
    if (!(lipschitz > 0.0)) fail("lipschitz", "must be positive");
    if (!(learning_rate >= 0.0)) fail("lr", "must be non-negative");
    if (!(eps_small >= 0.0)) fail("eps_small", "must be non-negative");
    if (!(eps_big >= 0.0)) fail("eps_big", "must be non-negative");
    if (!(alpha > 0.0 && alpha < 1.0)) fail("alpha", "must lie in (0, 1)");
    if (hidden == 0) fail("hidden", "must be positive");
    if (output == 0) fail("output", "must be positive");
    if (history_windows == 0) fail("history_windows", "must be positive");
    if (n_perm == 0) fail("n_perm", "must be positive");
    if (runs == 0) fail("runs", "must be positive");
    if (output_dir.empty()) fail("output_dir", "must not be empty");
}

StreamConfig RunConfig::stream_config(std::size_t length) const {
    StreamConfig sc;
    sc.window_size = window != 0 ? window : length / 10;
    sc.slide_size = slide != 0 ? slide : sc.window_size / 10;
    // Round an automatic window down to a multiple of the automatic slide.
    if (window == 0 && sc.slide_size != 0) {
        sc.window_size = sc.slide_size * 10;
    }
    try {
        sc.validate();
    } catch (const ContractError& e) {
        throw ConfigError(std::string("config: window: ") + e.what());
    }
    if (m > sc.slide_size) {
        throw ConfigError("config: m: exceeds the slide size " + std::to_string(sc.slide_size));
    }
    return sc;
}

DetectorConfig RunConfig::detector_config() const {
    DetectorConfig dc;
    dc.training = {m, k, lambda, lipschitz, learning_rate, eps_small, eps_big};
    dc.hidden = hidden;
    dc.output = output;
    dc.alpha = alpha;
    dc.history_windows = history_windows;
    return dc;
}

eval::PrequentialConfig RunConfig::prequential_config(std::size_t length) const {
    eval::PrequentialConfig pc;
    pc.method = method;
    pc.stream = stream_config(length);
    pc.detector = detector_config();
    pc.n_perm = n_perm;
    pc.heatmap = heatmap;
    return pc;
}

RunConfig default_run_config() {
    RunConfig config;
    if (const char* dir = std::getenv("MCDD_OUTPUT_DIR"); dir != nullptr && *dir != '\0') {
        config.output_dir = dir;
    }
    return config;
}

RunConfig parse_config(std::string_view text) {
    RunConfig config = default_run_config();
    std::set<std::string, std::less<>> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("config: expected 'key = value'", line_no);
        }
        const auto key = trim(line.substr(0, eq));
        if (!seen.insert(std::string(key)).second) {
            throw ConfigError("config: duplicate key '" + std::string(key) + "'");
        }
        config.set(key, line.substr(eq + 1));
    }
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config: cannot open " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string save_config(const RunConfig& c) {
    std::ostringstream out;
    if (c.task) out << "task = " << synth::to_string(*c.task) << '\n';
    if (c.csv) out << "csv = " << *c.csv << '\n';
    out << "seed = " << c.seed << '\n'
        << "method = " << eval::to_string(c.method) << '\n'
        << "window = " << c.window << '\n'
        << "slide = " << c.slide << '\n'
        << "m = " << c.m << '\n'
        << "k = " << c.k << '\n'
        << "lambda = " << format_double(c.lambda) << '\n'
        << "lipschitz = " << format_double(c.lipschitz) << '\n'
        << "lr = " << format_double(c.learning_rate) << '\n'
        << "eps_small = " << format_double(c.eps_small) << '\n'
        << "eps_big = " << format_double(c.eps_big) << '\n'
        << "alpha = " << format_double(c.alpha) << '\n'
        << "hidden = " << c.hidden << '\n'
        << "output = " << c.output << '\n'
        << "history_windows = " << c.history_windows << '\n'
        << "n_perm = " << c.n_perm << '\n'
        << "runs = " << c.runs << '\n'
        << "output_dir = " << c.output_dir << '\n'
        << "heatmap = " << (c.heatmap ? "true" : "false") << '\n';
    return out.str();
}

} // namespace mcdd
