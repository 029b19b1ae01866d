// Command-line front end: aging-data simulation, pre-processing, surrogate
// training, schedule optimization, sensitivity sweeps, and report emission.
// Exit codes: 0 ok, 1 usage/configuration error, 2 infeasible problem,
// 3 internal error.
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bdms/aging.hpp"
#include "bdms/cbup.hpp"
#include "bdms/dataprep.hpp"
#include "bdms/errors.hpp"
#include "bdms/io_util.hpp"
#include "bdms/mds.hpp"
#include "bdms/nnbd.hpp"
#include "bdms/nnodh.hpp"
#include "bdms/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace bdms;

namespace {

constexpr const char* kToolVersion = "1.0.0";

struct GlobalOpts {
    std::uint64_t seed = 0;
    std::string out = ".";
    int jobs = 1;
    std::string config;  // scenario JSON path
};

void write_manifest(const GlobalOpts& g, const std::string& command,
                    const std::vector<std::string>& args, const json& inputs) {
    json m;
    m["tool_version"] = kToolVersion;
    m["command"] = command;
    m["seed"] = g.seed;
    m["out"] = g.out;
    m["jobs"] = g.jobs;
    m["args"] = args;
    m["inputs"] = inputs;
    fs::create_directories(g.out);
    io::write_file_atomic(fs::path(g.out) / (command + "-manifest.json"), m.dump(2) + "\n");
}

void write_out(const GlobalOpts& g, const std::string& name, const std::string& content) {
    fs::create_directories(g.out);
    io::write_file_atomic(fs::path(g.out) / name, content);
}

mds::MicrogridConfig load_scenario(const GlobalOpts& g) {
    if (g.config.empty()) throw ParameterError("--config <scenario.json> is required");
    return mds::scenario_from_json(io::read_file(g.config));
}

nnbd::DegradationModel load_model(const std::string& path) {
    if (path.empty()) throw ParameterError("--model <model.json> is required");
    return nnbd::model_from_json(io::read_file(path));
}

cbup::DegradationCostParams cost_params_for(const mds::MicrogridConfig& config, double unit_price,
                                            double salvage, double soh_eol) {
    cbup::DegradationCostParams p;
    p.capital = unit_price * config.bess.e_max;
    p.salvage = salvage;
    p.soh_eol = soh_eol;
    p.validate();
    return p;
}

// A single non-iterative solve wrapped in the trace/report shape used by the
// heuristic, so every pipeline emits the same artifact set.
nnodh::NnodhResult single_solve(const mds::MicrogridConfig& config,
                                const mds::ExtraConstraints& extra,
                                const nnbd::DegradationModel& model,
                                const cbup::DegradationCostParams& cost) {
    nnodh::NnodhResult r;
    nnodh::IterationRecord rec;
    rec.index = 1;
    rec.solution = mds::solve_mds(config, extra);
    rec.cycles = cbup::aggregate_cycles(rec.solution, config);
    rec.throughput_kwh = rec.solution.throughput_kwh(config.dt);
    rec.bd = cbup::estimate_degradation(model, rec.cycles, config.bess.soh);
    rec.operation_cost = mds::operation_cost(config, rec.solution);
    rec.degradation_cost = cbup::degradation_cost(cost, rec.bd);
    rec.total_cost = rec.operation_cost + rec.degradation_cost;
    r.trace.push_back(std::move(rec));
    r.best_index = 1;
    r.metrics = nnodh::compute_metrics(r.trace, 1);
    r.stop_reason = "single solve";
    return r;
}

struct SchedulePipeline {
    bool nnodh = false;
    nnodh::Strategy strategy = nnodh::Strategy::bcl;
    mds::ExtraConstraints extra;  // for the non-iterative variants
};

SchedulePipeline parse_pipeline(const std::string& name, int cycle_limit, double bdc_rate) {
    SchedulePipeline p;
    if (name == "mds") return p;
    if (name == "cycle-limit") {
        p.extra.cycle_transition_limit = cycle_limit;
        return p;
    }
    if (name == "linear-bdc") {
        p.extra.linear_bdc_rate = bdc_rate;
        return p;
    }
    if (name.rfind("nnodh-", 0) == 0) {
        p.nnodh = true;
        p.strategy = nnodh::strategy_from_name(name.substr(6));
        return p;
    }
    throw ParameterError("unknown pipeline: " + name);
}

void emit_schedule_artifacts(const GlobalOpts& g, const mds::MicrogridConfig& config,
                             const nnodh::NnodhResult& result, const std::string& prefix) {
    const auto& best = result.trace[static_cast<std::size_t>(result.best_index - 1)];
    write_out(g, prefix + "schedule.csv", mds::solution_csv(best.solution));
    write_out(g, prefix + "cycles.csv", cbup::cycles_csv(best.cycles));
    write_out(g, prefix + "trace.csv", nnodh::trace_csv(result));
    write_out(g, prefix + "metrics.json", nnodh::summary_json(result));
    (void)config;
}

// Runs `points` tasks on up to `jobs` threads; results land at their index,
// so output order is independent of scheduling.
template <typename Fn>
void run_points(int points, int jobs, Fn&& fn) {
    if (jobs <= 1 || points <= 1) {
        for (int i = 0; i < points; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next.fetch_add(1); i < points; i = next.fetch_add(1)) fn(i);
    };
    std::vector<std::thread> pool;
    int n = std::min(jobs, points);
    pool.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

// ---------------------------------------------------------------- commands

int cmd_simulate_aging(const GlobalOpts& g, const std::vector<std::string>& args,
                       std::vector<double> temps, std::vector<double> c_rates, bool full_matrix,
                       aging::OracleParams params, std::int64_t cycle_cap) {
    params.validate();
    auto specs = full_matrix ? aging::generate_full_matrix(temps, c_rates, g.seed)
                             : aging::generate_test_matrix(temps, c_rates, g.seed);
    std::vector<aging::AgingTestResult> results;
    results.reserve(specs.size());
    for (const auto& spec : specs) results.push_back(aging::run_aging_test(spec, params, cycle_cap));
    fs::create_directories(g.out);
    aging::write_dataset(results, params, g.seed, fs::path(g.out) / "aging.csv",
                         fs::path(g.out) / "aging_params.json");
    write_manifest(g, "simulate-aging", args, json::object());
    std::size_t rows = 0;
    for (const auto& r : results) rows += r.cycle_count();
    std::cout << "wrote " << results.size() << " aging tests (" << rows << " cycles) to " << g.out
              << "\n";
    return 0;
}

int cmd_prep(const GlobalOpts& g, const std::vector<std::string>& args, const std::string& dataset,
             const std::string& mode_name, int window) {
    dataprep::Mode mode = dataprep::mode_from_name(mode_name);
    auto results = dataprep::load_results_csv(dataset);
    dataprep::Dataset ds = dataprep::build_dataset(results, mode, window);
    write_out(g, std::string("dataset_") + dataprep::mode_name(mode) + ".csv",
              dataprep::dataset_csv(ds));
    write_manifest(g, "prep", args, json{{"dataset", dataset}});
    std::cout << "wrote " << ds.rows() << " rows (" << ds.groups() << " tests), mode "
              << dataprep::mode_name(mode) << "\n";
    return 0;
}

struct TrainFlags {
    std::string dataset;
    std::string mode_name = "regressed";
    double split = 0.5;
    int window = 21;
    nnbd::TrainConfig config;
    bool batch_sweep = false;
};

int cmd_train(const GlobalOpts& g, const std::vector<std::string>& args, TrainFlags f) {
    dataprep::Mode mode = dataprep::mode_from_name(f.mode_name);
    auto results = dataprep::load_results_csv(f.dataset);
    dataprep::Dataset ds = dataprep::build_dataset(results, mode, f.window);
    auto [train_set, val_set] = dataprep::split_by_test(ds, f.split, g.seed);
    dataprep::NormStats stats = dataprep::standardize(train_set, {&val_set});
    f.config.seed = g.seed;
    f.config.validate();

    if (f.batch_sweep) {
        std::string csv = "batch_size,best_epoch,val_mse,val_acc15\n";
        for (int bs : {16, 32, 64, 128, 256, 512, 1024, 2048}) {
            nnbd::TrainConfig c = f.config;
            c.batch_size = bs;
            auto [model, report] = nnbd::train(train_set, val_set, stats, c);
            csv += std::to_string(bs) + "," + std::to_string(report.best_epoch) + "," +
                   io::format_double(model.final_val_mse) + "," +
                   io::format_double(nnbd::accuracy(model, val_set, 0.15)) + "\n";
        }
        write_out(g, "batch_sweep.csv", csv);
        write_manifest(g, "train", args, json{{"dataset", f.dataset}});
        std::cout << "wrote batch_sweep.csv\n";
        return 0;
    }

    auto [model, report] = nnbd::train(train_set, val_set, stats, f.config);
    double acc = nnbd::accuracy(model, val_set, 0.15);
    write_out(g, std::string("model_") + dataprep::mode_name(mode) + ".json",
              nnbd::model_json(model));
    write_out(g, std::string("train_report_") + dataprep::mode_name(mode) + ".csv",
              nnbd::report_csv(report));
    write_manifest(g, "train", args, json{{"dataset", f.dataset}});
    std::cout << "mode " << dataprep::mode_name(mode) << ": best epoch " << report.best_epoch
              << ", val mse " << model.final_val_mse << ", val acc15 " << acc << "\n";
    return 0;
}

struct ScheduleFlags {
    std::string model_path;
    std::string pipeline = "nnodh-bcl";
    double alpha = 0.03;
    int max_iterations = 200;
    int stop_window = 11;
    int cycle_limit = 2;
    double linear_bdc_rate = 0.005;
    double unit_price = 400.0;
    double salvage = 0.0;
    double soh_eol = 0.7;
    bool all_strategies = false;
};

int cmd_schedule(const GlobalOpts& g, const std::vector<std::string>& args,
                 const ScheduleFlags& f) {
    mds::MicrogridConfig config = load_scenario(g);
    nnbd::DegradationModel model = load_model(f.model_path);
    cbup::DegradationCostParams cost =
        cost_params_for(config, f.unit_price, f.salvage, f.soh_eol);
    nnodh::NnodhConfig nc;
    nc.alpha = f.alpha;
    nc.max_iterations = f.max_iterations;
    nc.stop_window = f.stop_window;

    if (f.all_strategies) {
        std::vector<nnodh::NnodhResult> runs;
        for (nnodh::Strategy s : {nnodh::Strategy::bcl, nnodh::Strategy::pbcl,
                                  nnodh::Strategy::brl, nnodh::Strategy::all}) {
            nnodh::NnodhConfig c = nc;
            c.strategy = s;
            runs.push_back(nnodh::run(config, model, c, cost));
            emit_schedule_artifacts(g, config, runs.back(),
                                    std::string(nnodh::strategy_name(s)) + "_");
        }
        std::string csv = "metric,bcl,pbcl,brl,all\n";
        auto row = [&](const std::string& name, auto get) {
            csv += name;
            for (const auto& r : runs) csv += "," + io::format_double(get(r));
            csv += "\n";
        };
        auto best = [](const nnodh::NnodhResult& r) -> const nnodh::IterationRecord& {
            return r.trace[static_cast<std::size_t>(r.best_index - 1)];
        };
        row("iterations", [](const auto& r) { return double(r.trace.size()); });
        row("best_index", [](const auto& r) { return double(r.best_index); });
        row("operation_cost", [&](const auto& r) { return best(r).operation_cost; });
        row("degradation_cost", [&](const auto& r) { return best(r).degradation_cost; });
        row("total_cost", [&](const auto& r) { return best(r).total_cost; });
        row("tcr_pct", [](const auto& r) { return r.metrics.tcr; });
        row("dcr_pct", [](const auto& r) { return r.metrics.dcr; });
        row("oci_pct", [](const auto& r) { return r.metrics.oci; });
        write_out(g, "strategy_comparison.csv", csv);
        write_manifest(g, "schedule", args,
                       json{{"scenario", g.config}, {"model", f.model_path}});
        std::cout << "wrote strategy_comparison.csv and per-strategy artifacts\n";
        return 0;
    }

    SchedulePipeline p = parse_pipeline(f.pipeline, f.cycle_limit, f.linear_bdc_rate);
    nnodh::NnodhResult result;
    if (p.nnodh) {
        nc.strategy = p.strategy;
        result = nnodh::run(config, model, nc, cost);
    } else {
        result = single_solve(config, p.extra, model, cost);
    }
    emit_schedule_artifacts(g, config, result, "");
    write_manifest(g, "schedule", args, json{{"scenario", g.config}, {"model", f.model_path}});
    const auto& best = result.trace[static_cast<std::size_t>(result.best_index - 1)];
    std::cout << f.pipeline << ": " << result.trace.size() << " iteration(s), best total cost "
              << best.total_cost << " (" << result.stop_reason << ")\n";
    return 0;
}

struct SweepFlags {
    std::string kind;
    std::string model_path;
    std::string strategy = "bcl";
    double alpha = 0.03;
    int max_iterations = 200;
    int stop_window = 11;
    std::vector<double> alphas{0.01, 0.02, 0.05, 0.1, 0.2};
    std::vector<double> penetrations{0.2, 0.4, 0.6, 0.8};
    std::vector<double> sizes{200, 300, 400};
    std::vector<double> prices{200, 250, 300, 400};
    double unit_price = 400.0;
    double salvage = 0.0;
    double soh_eol = 0.7;
    bool timings = false;  // wall-clock column is opt-in: it breaks reproducibility
};

int cmd_sweep(const GlobalOpts& g, const std::vector<std::string>& args, const SweepFlags& f) {
    nnbd::DegradationModel model = load_model(f.model_path);

    struct Point {
        std::vector<double> key;
        double e_max = 300.0;
        double unit_price = 400.0;
        double penetration = 0.8;
        double alpha = 0.03;
    };
    std::vector<Point> points;
    std::string key_header;
    if (f.kind == "borf") {
        key_header = "alpha";
        if (f.alphas.empty()) throw ParameterError("--alphas grid must be non-empty");
        for (double a : f.alphas) points.push_back({{a}, 300.0, f.unit_price, 0.8, a});
    } else if (f.kind == "res-penetration") {
        key_header = "penetration";
        if (f.penetrations.empty()) throw ParameterError("--penetrations grid must be non-empty");
        for (double pen : f.penetrations)
            points.push_back({{pen}, 300.0, f.unit_price, pen, f.alpha});
    } else if (f.kind == "size-price") {
        key_header = "size_kwh,price_per_kwh";
        if (f.sizes.empty() || f.prices.empty())
            throw ParameterError("--sizes and --prices grids must be non-empty");
        for (double s : f.sizes)
            for (double pr : f.prices) points.push_back({{s, pr}, s, pr, 0.8, f.alpha});
    } else {
        throw ParameterError("unknown sweep kind: " + f.kind +
                             " (expected borf, res-penetration, or size-price)");
    }

    std::optional<mds::MicrogridConfig> base;
    if (!g.config.empty()) base = load_scenario(g);
    nnodh::Strategy strategy = nnodh::strategy_from_name(f.strategy);

    std::vector<std::string> rows(points.size());
    run_points(static_cast<int>(points.size()), g.jobs, [&](int i) {
        const Point& pt = points[static_cast<std::size_t>(i)];
        std::string row;
        for (double k : pt.key) row += io::format_double(k) + ",";
        auto t0 = std::chrono::steady_clock::now();
        try {
            mds::MicrogridConfig config;
            if (f.kind == "borf" && base) {
                config = *base;
            } else {
                scenario::ScenarioOptions so;
                so.seed = g.seed;
                so.penetration = pt.penetration;
                so.bess_e_max = pt.e_max;
                so.bess_unit_price = pt.unit_price;
                config = scenario::make_scenario(so);
            }
            cbup::DegradationCostParams cost =
                cost_params_for(config, pt.unit_price, f.salvage, f.soh_eol);
            nnodh::NnodhConfig nc;
            nc.strategy = strategy;
            nc.alpha = pt.alpha;
            nc.max_iterations = f.max_iterations;
            nc.stop_window = f.stop_window;
            nnodh::NnodhResult r = nnodh::run(config, model, nc, cost);
            const auto& best = r.trace[static_cast<std::size_t>(r.best_index - 1)];
            row += std::to_string(r.trace.size()) + "," + std::to_string(r.best_index) + "," +
                   io::format_double(best.total_cost) + "," + io::format_double(r.metrics.tcr) +
                   "," + (r.metrics.dcr_defined ? io::format_double(r.metrics.dcr) : "") + "," +
                   io::format_double(r.metrics.oci) + ",ok";
        } catch (const std::exception& e) {
            row += ",,,,,,error: " + std::string(e.what());
        }
        if (f.timings) {
            auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
            row += "," + std::to_string(ms);
        }
        rows[static_cast<std::size_t>(i)] = row + "\n";
    });

    std::string csv = key_header + ",iterations,best_index,total_cost,tcr_pct,dcr_pct,oci_pct,status";
    if (f.timings) csv += ",wall_ms";
    csv += "\n";
    for (const auto& r : rows) csv += r;
    write_out(g, "sweep_" + f.kind + ".csv", csv);
    write_manifest(g, "sweep", args, json{{"scenario", g.config}, {"model", f.model_path}});
    std::cout << "wrote sweep_" << f.kind << ".csv (" << points.size() << " points)\n";
    return 0;
}

int cmd_make_scenario(const GlobalOpts& g, const std::vector<std::string>& args,
                      double penetration, int intervals, double e_max, double unit_price) {
    scenario::ScenarioOptions so;
    so.seed = g.seed;
    so.penetration = penetration;
    so.intervals = intervals;
    so.bess_e_max = e_max;
    so.bess_unit_price = unit_price;
    so.validate();
    mds::MicrogridConfig config = scenario::make_scenario(so);
    write_out(g, "scenario.json", mds::scenario_json(config));
    write_out(g, "profiles.csv", mds::profiles_csv(config.profiles));
    write_manifest(g, "make-scenario", args, json::object());
    std::cout << "wrote scenario.json and profiles.csv (" << intervals << " intervals)\n";
    return 0;
}

int cmd_report(const GlobalOpts& g, const std::vector<std::string>& args,
               const ScheduleFlags& f) {
    mds::MicrogridConfig config = load_scenario(g);
    nnbd::DegradationModel model = load_model(f.model_path);
    cbup::DegradationCostParams cost =
        cost_params_for(config, f.unit_price, f.salvage, f.soh_eol);
    nnodh::BenchmarkConfig bench;
    bench.linear_bdc_rate = f.linear_bdc_rate;
    bench.cycle_limit = f.cycle_limit;
    bench.nnodh.alpha = f.alpha;
    bench.nnodh.max_iterations = f.max_iterations;
    bench.nnodh.stop_window = f.stop_window;
    auto rows = nnodh::compare_benchmarks(config, model, cost, bench);
    write_out(g, "benchmarks.csv", nnodh::benchmarks_csv(rows));
    write_manifest(g, "report", args, json{{"scenario", g.config}, {"model", f.model_path}});
    std::cout << "wrote benchmarks.csv (" << rows.size() << " rows)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> raw_args(argv + 1, argv + argc);
    CLI::App app{"Battery-degradation-aware microgrid scheduling toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // let --seed/--out/--config appear after the subcommand

    GlobalOpts g;
    app.add_option("--seed", g.seed, "Master random seed");
    app.add_option("--out", g.out, "Output directory");
    app.add_option("--jobs", g.jobs, "Concurrent sweep points")->check(CLI::PositiveNumber);
    app.add_option("--config", g.config, "Scenario JSON path");

    // simulate-aging
    auto* sim = app.add_subcommand("simulate-aging", "Generate a synthetic aging-test dataset");
    std::vector<double> temps{15, 25, 35};
    std::vector<double> c_rates{0.25, 0.5, 1.0};
    bool full_matrix = false;
    aging::OracleParams oracle;
    std::int64_t cycle_cap = 1'000'000;
    sim->add_option("--temps", temps, "Ambient temperatures, degC");
    sim->add_option("--c-rates", c_rates, "C-rates, 1/h");
    sim->add_flag("--full-matrix", full_matrix, "Replicate the full 945-test campaign");
    sim->add_option("--k-ref", oracle.k_ref, "Oracle reference loss per cycle");
    sim->add_option("--eol-soh", oracle.eol_soh, "End-of-test SOH threshold");
    sim->add_option("--cycle-cap", cycle_cap, "Per-test cycle-count guard");

    // prep
    auto* prep = app.add_subcommand("prep", "Pre-process an aging dataset into NN-ready rows");
    std::string prep_dataset, prep_mode = "regressed";
    int prep_window = 21;
    prep->add_option("--dataset", prep_dataset, "Aging CSV path")->required();
    prep->add_option("--mode", prep_mode, "raw | smoothed | regressed");
    prep->add_option("--window", prep_window, "Smoothing window (odd)");

    // train
    auto* train = app.add_subcommand("train", "Train the degradation surrogate");
    TrainFlags tf;
    train->add_option("--dataset", tf.dataset, "Aging CSV path")->required();
    train->add_option("--mode", tf.mode_name, "raw | smoothed | regressed");
    train->add_option("--split", tf.split, "Train fraction of aging tests");
    train->add_option("--window", tf.window, "Smoothing window (odd)");
    train->add_option("--batch-size", tf.config.batch_size, "Mini-batch size");
    train->add_option("--epochs", tf.config.max_epochs, "Training epochs");
    train->add_option("--lr", tf.config.learning_rate, "Initial learning rate");
    train->add_option("--decay-period", tf.config.decay_period, "Epochs between rate decays");
    train->add_flag("--batch-sweep", tf.batch_sweep, "Sweep batch sizes 16..2048 instead");

    // schedule
    auto* sched = app.add_subcommand("schedule", "Solve day-ahead scheduling");
    ScheduleFlags sf;
    sched->add_option("--model", sf.model_path, "Trained model JSON")->required();
    sched->add_option("--pipeline", sf.pipeline,
                      "mds | cycle-limit | linear-bdc | nnodh-{bcl,pbcl,brl,all}");
    sched->add_option("--alpha", sf.alpha, "Restriction factor per iteration");
    sched->add_option("--max-iterations", sf.max_iterations, "Iteration cap");
    sched->add_option("--stop-window", sf.stop_window, "Stop-rule window (odd)");
    sched->add_option("--cycle-limit", sf.cycle_limit, "Status-change cap for cycle-limit");
    sched->add_option("--linear-bdc-rate", sf.linear_bdc_rate, "$/kWh for linear-bdc");
    sched->add_option("--unit-price", sf.unit_price, "BESS unit price, $/kWh");
    sched->add_option("--salvage", sf.salvage, "BESS salvage value, $");
    sched->add_option("--soh-eol", sf.soh_eol, "Lifetime-accounting end-of-life SOH");
    sched->add_flag("--all-strategies", sf.all_strategies, "Compare all four strategies");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Sensitivity sweeps over a parameter grid");
    SweepFlags wf;
    sweep->add_option("--kind", wf.kind, "borf | res-penetration | size-price")->required();
    sweep->add_option("--model", wf.model_path, "Trained model JSON")->required();
    sweep->add_option("--strategy", wf.strategy, "bcl | pbcl | brl | all");
    sweep->add_option("--alpha", wf.alpha, "Restriction factor for non-borf sweeps");
    sweep->add_option("--max-iterations", wf.max_iterations, "Iteration cap");
    sweep->add_option("--stop-window", wf.stop_window, "Stop-rule window (odd)");
    sweep->add_option("--alphas", wf.alphas, "borf grid");
    sweep->add_option("--penetrations", wf.penetrations, "res-penetration grid");
    sweep->add_option("--sizes", wf.sizes, "BESS sizes, kWh");
    sweep->add_option("--prices", wf.prices, "BESS unit prices, $/kWh");
    sweep->add_option("--unit-price", wf.unit_price, "BESS unit price for non-size-price sweeps");
    sweep->add_option("--salvage", wf.salvage, "BESS salvage value, $");
    sweep->add_option("--soh-eol", wf.soh_eol, "Lifetime-accounting end-of-life SOH");
    sweep->add_flag("--timings", wf.timings, "Append a wall_ms column (not reproducible)");

    // make-scenario
    auto* mk = app.add_subcommand("make-scenario", "Emit a synthetic 24-interval testbed");
    double mk_penetration = 0.8, mk_e_max = 300.0, mk_unit_price = 400.0;
    int mk_intervals = 24;
    mk->add_option("--penetration", mk_penetration, "mean(wind+pv)/mean(load)");
    mk->add_option("--intervals", mk_intervals, "Horizon length");
    mk->add_option("--e-max", mk_e_max, "BESS rated energy, kWh");
    mk->add_option("--unit-price", mk_unit_price, "BESS unit price, $/kWh");

    // report
    auto* rep = app.add_subcommand("report", "Benchmark comparison table for a scenario");
    ScheduleFlags rf;
    rep->add_option("--model", rf.model_path, "Trained model JSON")->required();
    rep->add_option("--alpha", rf.alpha, "Restriction factor for the heuristic row");
    rep->add_option("--max-iterations", rf.max_iterations, "Iteration cap");
    rep->add_option("--stop-window", rf.stop_window, "Stop-rule window (odd)");
    rep->add_option("--cycle-limit", rf.cycle_limit, "Status-change cap for the cycle-limit row");
    rep->add_option("--linear-bdc-rate", rf.linear_bdc_rate, "$/kWh for the linear-usage row");
    rep->add_option("--unit-price", rf.unit_price, "BESS unit price, $/kWh");
    rep->add_option("--salvage", rf.salvage, "BESS salvage value, $");
    rep->add_option("--soh-eol", rf.soh_eol, "Lifetime-accounting end-of-life SOH");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (sim->parsed())
            return cmd_simulate_aging(g, raw_args, temps, c_rates, full_matrix, oracle, cycle_cap);
        if (prep->parsed()) return cmd_prep(g, raw_args, prep_dataset, prep_mode, prep_window);
        if (train->parsed()) return cmd_train(g, raw_args, tf);
        if (sched->parsed()) return cmd_schedule(g, raw_args, sf);
        if (sweep->parsed()) return cmd_sweep(g, raw_args, wf);
        if (mk->parsed())
            return cmd_make_scenario(g, raw_args, mk_penetration, mk_intervals, mk_e_max,
                                     mk_unit_price);
        if (rep->parsed()) return cmd_report(g, raw_args, rf);
        std::cerr << "no command selected\n";
        return 1;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const ParameterError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const DomainError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
