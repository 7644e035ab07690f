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

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mcdd/cli.hpp"
#include "mcdd/config.hpp"
#include "mcdd/error.hpp"

namespace mcdd {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("mcdd_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int cli(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
    args.insert(args.begin(), "mcdd");
    std::ostringstream out, err;
    const int code = run_command(args, out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return code;
}

TEST(Config, DefaultsFromTaskOnly) {
    const RunConfig c = parse_config("task = GM_Sud\n");
    EXPECT_EQ(c.task, synth::TaskId::GM_Sud);
    EXPECT_EQ(c.m, 30u);
    EXPECT_EQ(c.k, 10u);
    EXPECT_EQ(c.lambda, 1.0);
    EXPECT_EQ(c.eps_small, 1.0);
    EXPECT_EQ(c.eps_big, 10.0);
    EXPECT_EQ(c.lipschitz, 1.0);
    EXPECT_EQ(c.learning_rate, 0.005);
    EXPECT_EQ(c.alpha, 0.05);
    EXPECT_EQ(c.n_perm, 200u);
    EXPECT_NO_THROW(c.validate());
    const StreamConfig sc = c.stream_config(30000);
    EXPECT_EQ(sc.window_size, 3000u);
    EXPECT_EQ(sc.slide_size, 300u);
}

TEST(Config, Grammar) {
    const RunConfig c = parse_config("# comment\n\n  task = GM_Inc   # trailing\nseed=12\nlambda = 0.5\nheatmap = true\n");
    EXPECT_EQ(c.task, synth::TaskId::GM_Inc);
    EXPECT_EQ(c.seed, 12u);
    EXPECT_EQ(c.lambda, 0.5);
    EXPECT_TRUE(c.heatmap);
    EXPECT_THROW(parse_config("task = GM_Sud\nbogus = 1\n"), ConfigError);
    EXPECT_THROW(parse_config("seed = 1\nseed = 2\n"), ConfigError);
    EXPECT_THROW(parse_config("seed = x\n"), ConfigError);
    EXPECT_THROW(parse_config("just words\n"), ParseError);
}

TEST(Config, ValidationNamesField) {
    RunConfig c = parse_config("task = GM_Sud\nwindow = 3000\nslide = 700\n");
    try {
        c.validate();
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("slide"), std::string::npos);
    }
    c = parse_config("task = GM_Sud\nalpha = 1.5\n");
    try {
        c.validate();
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("alpha"), std::string::npos);
    }
    EXPECT_THROW(parse_config("seed = 1\n").validate(), ConfigError);
    EXPECT_THROW(parse_config("task = GM_Sud\ncsv = x.csv\n").validate(), ConfigError);
}

TEST(Config, RoundTrip) {
    RunConfig c = parse_config("csv = data/stream.csv\n");
    c.seed = 123456789012345ULL;
    c.method = eval::Method::MmdGk;
    c.window = 1000;
    c.slide = 100;
    c.lambda = 0.1;
    c.learning_rate = 1e-3 / 3.0;
    c.eps_small = 0.3;
    c.alpha = 0.01;
    c.hidden = 50;
    c.runs = 3;
    c.output_dir = "out dir";
    c.heatmap = true;
    EXPECT_EQ(parse_config(save_config(c)), c);
    const RunConfig t = parse_config("task = LogGamWei_Sud\n");
    EXPECT_EQ(parse_config(save_config(t)), t);
}

TEST(Config, LoadFromFile) {
    const auto dir = scratch("load");
    std::ofstream(dir / "run.cfg") << "task = GM_Rec\nm = 20\n";
    const RunConfig c = load_config(dir / "run.cfg");
    EXPECT_EQ(c.task, synth::TaskId::GM_Rec);
    EXPECT_EQ(c.m, 20u);
    EXPECT_THROW(load_config(dir / "missing.cfg"), ConfigError);
}

TEST(Cli, BoundPrintsValue) {
    std::string out;
    EXPECT_EQ(cli({"bound", "--alpha", "0.05", "--n", "2", "--L", "1", "--sigma", "1"}, &out), 0);
    EXPECT_EQ(out, "1.959964\n");
}

TEST(Cli, GenerateWritesCsv) {
    const auto dir = scratch("generate");
    const auto path = dir / "gm_sud.csv";
    EXPECT_EQ(cli({"generate", "--task", "GM_Sud", "--seed", "7", "--out", path.string()}), 0);
    const CsvStream s = ingest_csv(path);
    EXPECT_EQ(s.points.size(), 30000u);
    ASSERT_TRUE(s.has_labels());
    EXPECT_TRUE(s.drift[21000]);
    EXPECT_FALSE(fs::exists(dir / "gm_sud.csv.tmp"));
}

TEST(Cli, RunIsByteDeterministic) {
    const auto dir = scratch("run");
    const std::vector<std::string> base{"run", "--task", "GM_Sud", "--seed", "4", "--window", "1000", "--slide",
                                        "100", "--set", "hidden=16", "--set", "output=8"};
    auto a = base, b = base;
    a.insert(a.end(), {"--out-dir", (dir / "a").string()});
    b.insert(b.end(), {"--out-dir", (dir / "b").string()});
    ASSERT_EQ(cli(a), 0);
    ASSERT_EQ(cli(b), 0);
    for (const char* f : {"reports.jsonl", "trace.csv", "sigma_trace.csv"}) {
        const auto x = slurp(dir / "a" / f);
        EXPECT_FALSE(x.empty()) << f;
        EXPECT_EQ(x, slurp(dir / "b" / f)) << f;
    }
    std::istringstream lines(slurp(dir / "a" / "reports.jsonl"));
    std::size_t n = 0;
    for (std::string line; std::getline(lines, line); ++n) {
        const auto j = nlohmann::json::parse(line);
        EXPECT_TRUE(j.contains("mcd_value"));
        EXPECT_TRUE(j.contains("drift"));
    }
    EXPECT_EQ(n, 291u);
}

TEST(Cli, EvalWritesMetrics) {
    const auto dir = scratch("eval");
    ASSERT_EQ(cli({"eval", "--task", "GM_Sud", "--method", "ks", "--runs", "3", "--out-dir", dir.string()}), 0);
    const auto doc = nlohmann::json::parse(slurp(dir / "metrics.json"));
    EXPECT_EQ(doc["method"], "ks");
    EXPECT_EQ(doc["runs"].size(), 3u);
    EXPECT_TRUE(fs::exists(dir / "traces" / "run_002.csv"));
}

TEST(Cli, BadConfigFailsWithMessage) {
    std::string err;
    EXPECT_NE(cli({"run", "--task", "GM_Sud", "--window", "3000", "--slide", "700"}, nullptr, &err), 0);
    EXPECT_NE(err.find("slide"), std::string::npos);
    EXPECT_NE(cli({"run", "--task", "NoSuchTask"}, nullptr, &err), 0);
    EXPECT_NE(cli({"frobnicate"}, nullptr, &err), 0);
    EXPECT_NE(cli({"run", "--csv", "/nonexistent/file.csv"}, nullptr, &err), 0);
    EXPECT_NE(err.find("mcdd run"), std::string::npos);
}

TEST(Cli, EnvironmentSetsOutputDir) {
    const auto dir = scratch("env");
    ::setenv("MCDD_OUTPUT_DIR", dir.string().c_str(), 1);
    const RunConfig c = parse_config("task = GM_Sud\n");
    ::unsetenv("MCDD_OUTPUT_DIR");
    EXPECT_EQ(c.output_dir, dir.string());
}

} // namespace
} // namespace mcdd
