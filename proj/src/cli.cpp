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

#include "mcdd/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcdd/config.hpp"
#include "mcdd/error.hpp"
#include "mcdd/evalharness.hpp"
#include "mcdd/theory.hpp"

namespace mcdd {

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot open " + tmp.string() + " for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            throw Error("failed writing " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

namespace {

// Stream-level options shared by run, eval, heatmap and bench.
struct CommonOptions {
    std::string config_path;
    std::map<std::string, std::string> flags;
    std::vector<std::string> sets;

    void attach(CLI::App& app, bool with_method) {
        app.add_option("--config", config_path, "Run configuration file");
        const auto flag = [&](const std::string& name, const std::string& key, const std::string& help) {
            app.add_option_function<std::string>(
                name, [this, key](const std::string& v) { flags[key] = v; }, help);
        };
        flag("--task", "task", "Synthetic task id");
        flag("--csv", "csv", "Stream CSV file");
        flag("--seed", "seed", "Base seed");
        flag("--window", "window", "Window size W");
        flag("--slide", "slide", "Slide size S");
        flag("--alpha", "alpha", "Significance level");
        flag("--runs", "runs", "Number of seeded runs");
        flag("--out-dir", "output_dir", "Output directory");
        if (with_method) {
            flag("--method", "method", "mcd_dd | ks | mmd_gk");
        }
        app.add_option("--set", sets, "Override any config key: key=value");
    }

    RunConfig resolve() const {
        RunConfig config = config_path.empty() ? default_run_config() : load_config(config_path);
        for (const auto& [key, value] : flags) {
            if (key == "task") config.csv.reset();
            if (key == "csv") config.task.reset();
            config.set(key, value);
        }
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) {
                throw ConfigError("--set expects key=value, got '" + s + "'");
            }
            config.set(s.substr(0, eq), s.substr(eq + 1));
        }
        config.validate();
        return config;
    }
};

synth::LabeledStream load_stream(const RunConfig& config, std::uint64_t seed) {
    if (config.task) {
        return synth::generate_task({*config.task, seed});
    }
    return eval::from_csv(ingest_csv(*config.csv));
}

std::filesystem::path out_path(const RunConfig& config, const std::string& name) {
    return std::filesystem::path(config.output_dir) / name;
}

std::string trace_text(const eval::PrequentialResult& result) {
    std::ostringstream s;
    eval::write_trace_csv(s, result);
    return s.str();
}

int cmd_generate(const std::string& task_name, std::uint64_t seed, std::string out, std::ostream& os) {
    const auto task = synth::parse_task(task_name);
    if (!task) {
        throw ConfigError("unknown task '" + task_name + "'");
    }
    const auto stream = synth::generate_task({*task, seed});
    if (out.empty()) {
        out = (std::filesystem::path(default_run_config().output_dir) /
               (std::string(synth::to_string(*task)) + "_" + std::to_string(seed) + ".csv"))
                  .string();
    }
    std::ostringstream s;
    write_csv(s, stream.points, stream.point_labels());
    write_file_atomic(out, s.str());
    os << "wrote " << stream.points.size() << " points to " << out << '\n';
    return 0;
}

int cmd_run(const RunConfig& config, const std::string& checkpoint, std::ostream& os) {
    const auto stream = load_stream(config, config.seed);
    const auto result = eval::prequential_run(stream, config.prequential_config(stream.points.size()), config.seed);
    std::string jsonl;
    for (const auto& step : result.steps) {
        jsonl += eval::to_json(step, result.method).dump();
        jsonl += '\n';
    }
    write_file_atomic(out_path(config, "reports.jsonl"), jsonl);
    write_file_atomic(out_path(config, "trace.csv"), trace_text(result));
    write_file_atomic(out_path(config, "run_config.txt"), save_config(config));
    if (config.method == eval::Method::McdDd) {
        std::ostringstream sigma;
        eval::write_sigma_csv(sigma, result);
        write_file_atomic(out_path(config, "sigma_trace.csv"), sigma.str());
        if (config.heatmap) {
            std::ostringstream hm;
            write_heatmap_csv(hm, result.heatmap);
            write_file_atomic(out_path(config, "heatmap.csv"), hm.str());
        }
    }
    if (!checkpoint.empty()) {
        if (!result.final_params) {
            throw ConfigError("--checkpoint requires method mcd_dd");
        }
        const nlohmann::json hyper = {{"config", save_config(config)}};
        write_file_atomic(checkpoint, to_json(Checkpoint{*result.final_params, config.seed, hyper}).dump(1) + "\n");
    }
    const auto metrics = eval::compute_metrics(result.predictions, result.truth);
    os << "windows " << result.steps.size() << ", flagged "
       << std::count(result.predictions.begin(), result.predictions.end(), true) << ", precision "
       << metrics.precision << ", f1 " << metrics.f1 << ", mcc " << metrics.mcc << '\n';
    return 0;
}

int cmd_eval(const RunConfig& config, std::size_t jobs, std::ostream& os) {
    const std::size_t runs = config.runs;
    std::vector<eval::PrequentialResult> results(runs);
    std::vector<std::string> failures(runs);
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < runs; i = next++) {
            try {
                const std::uint64_t seed = config.seed + i;
                const auto stream = load_stream(config, seed);
                results[i] = eval::prequential_run(stream, config.prequential_config(stream.points.size()), seed);
            } catch (const std::exception& e) {
                failures[i] = "run " + std::to_string(i) + ": " + e.what();
            }
        }
    };
    jobs = std::clamp<std::size_t>(jobs, 1, runs);
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < jobs; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool) {
        t.join();
    }
    for (const auto& f : failures) {
        if (!f.empty()) {
            throw Error(f);
        }
    }
    std::vector<eval::MetricsReport> reports;
    for (std::size_t i = 0; i < runs; ++i) {
        reports.push_back(eval::compute_metrics(results[i].predictions, results[i].truth));
        char name[32];
        std::snprintf(name, sizeof name, "traces/run_%03zu.csv", i);
        write_file_atomic(out_path(config, name), trace_text(results[i]));
    }
    const auto summary = eval::summarize(reports);
    nlohmann::json doc = eval::to_json(summary);
    doc["method"] = eval::to_string(config.method);
    doc["base_seed"] = config.seed;
    doc["n_runs"] = runs;
    write_file_atomic(out_path(config, "metrics.json"), doc.dump(2) + "\n");
    os << eval::to_string(config.method) << ": precision " << summary.precision.mean << " +- "
       << summary.precision.std << ", f1 " << summary.f1.mean << " +- " << summary.f1.std << ", mcc "
       << summary.mcc.mean << " +- " << summary.mcc.std << " over " << runs << " runs\n";
    return 0;
}

int cmd_heatmap(RunConfig config, std::ostream& os) {
    if (config.method != eval::Method::McdDd) {
        throw ConfigError("heatmap requires method mcd_dd");
    }
    config.heatmap = true;
    const auto stream = load_stream(config, config.seed);
    const auto result = eval::prequential_run(stream, config.prequential_config(stream.points.size()), config.seed);
    std::ostringstream hm;
    write_heatmap_csv(hm, result.heatmap);
    const auto path = out_path(config, "heatmap.csv");
    write_file_atomic(path, hm.str());
    os << "wrote " << result.heatmap.columns.size() << " heatmap columns to " << path.string() << '\n';
    return 0;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

int cmd_bench(RunConfig config, const std::vector<std::size_t>& hidden, std::ostream& os) {
    config.method = eval::Method::McdDd;
    const auto stream = load_stream(config, config.seed);
    std::ostringstream table;
    table << "hidden,windows,sampling_s,training_s,inference_s,total_s\n";
    for (const std::size_t h : hidden) {
        RunConfig c = config;
        c.hidden = h;
        c.validate();
        std::vector<PhaseTimings> timings;
        eval::prequential_run(stream, c.prequential_config(stream.points.size()), c.seed, &timings);
        std::vector<double> s, t, inf, tot;
        for (const auto& p : timings) {
            s.push_back(p.sampling_s);
            t.push_back(p.training_s);
            inf.push_back(p.inference_s);
            tot.push_back(p.sampling_s + p.training_s + p.inference_s);
        }
        table << h << ',' << timings.size() << std::fixed << std::setprecision(6) << ',' << median(s) << ','
              << median(t) << ',' << median(inf) << ',' << median(tot) << '\n'
              << std::defaultfloat;
    }
    os << table.str();
    return 0;
}

} // namespace

int run_command(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Concept drift detection with maximum concept discrepancy", "mcdd"};
    app.require_subcommand(1);

    auto* generate = app.add_subcommand("generate", "Write a synthetic task as CSV with a drift column");
    std::string gen_task;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    generate->add_option("--task", gen_task, "Synthetic task id")->required();
    generate->add_option("--seed", gen_seed, "Generator seed");
    generate->add_option("--out", gen_out, "Output CSV path");

    auto* run = app.add_subcommand("run", "Prequential run: reports.jsonl, trace.csv, sigma_trace.csv");
    CommonOptions run_opts;
    run_opts.attach(*run, true);
    std::string checkpoint;
    bool run_heatmap = false;
    run->add_option("--checkpoint", checkpoint, "Save the final encoder to this path");
    run->add_flag("--heatmap", run_heatmap, "Also write heatmap.csv");

    auto* evalc = app.add_subcommand("eval", "Seeded runs summarized in metrics.json");
    CommonOptions eval_opts;
    eval_opts.attach(*evalc, true);
    std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
    evalc->add_option("--jobs", jobs, "Worker threads");

    auto* heatmap = app.add_subcommand("heatmap", "MCD heatmap matrix as CSV");
    CommonOptions heat_opts;
    heat_opts.attach(*heatmap, false);

    auto* bound = app.add_subcommand("bound", "Print the MCD upper bound");
    theory::BoundInputs bi;
    bound->add_option("--alpha", bi.alpha, "Significance level")->required();
    bound->add_option("--n", bi.n, "Sample set size")->required();
    bound->add_option("--L", bi.lipschitz, "Lipschitz constant")->required();
    bound->add_option("--sigma", bi.data_sigma, "Data standard deviation")->required();

    auto* bench = app.add_subcommand("bench", "Median per-window phase timings");
    CommonOptions bench_opts;
    bench_opts.attach(*bench, false);
    std::vector<std::size_t> bench_hidden{100};
    bench->add_option("--hidden", bench_hidden, "Hidden layer sizes")->expected(1, -1);

    std::vector<std::string> args(argv.rbegin(), argv.rend() - 1);
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code;
    }

    std::string where = "mcdd";
    try {
        if (generate->parsed()) {
            where = "mcdd generate";
            return cmd_generate(gen_task, gen_seed, gen_out, out);
        }
        if (run->parsed()) {
            where = "mcdd run";
            RunConfig config = run_opts.resolve();
            config.heatmap = config.heatmap || run_heatmap;
            return cmd_run(config, checkpoint, out);
        }
        if (evalc->parsed()) {
            where = "mcdd eval";
            return cmd_eval(eval_opts.resolve(), jobs, out);
        }
        if (heatmap->parsed()) {
            where = "mcdd heatmap";
            return cmd_heatmap(heat_opts.resolve(), out);
        }
        if (bound->parsed()) {
            where = "mcdd bound";
            out << std::fixed << std::setprecision(6) << theory::mcd_bound(bi) << '\n';
            return 0;
        }
        if (bench->parsed()) {
            where = "mcdd bench";
            if (bench_opts.flags.count("task") == 0 && bench_opts.config_path.empty()) {
                bench_opts.flags["task"] = "GM_Sud";
            }
            return cmd_bench(bench_opts.resolve(), bench_hidden, out);
        }
    } catch (const ParseError& e) {
        err << where << ": line " << e.line() << ": " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << where << ": " << e.what() << '\n';
        return dynamic_cast<const ConfigError*>(&e) != nullptr ? 2 : 1;
    }
    return 1;
}

} // namespace mcdd
