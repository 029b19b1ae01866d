#include "bdms/nnodh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bdms/errors.hpp"
#include "bdms/io_util.hpp"
#include "json.hpp"

namespace bdms::nnodh {

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::bcl: return "bcl";
        case Strategy::pbcl: return "pbcl";
        case Strategy::brl: return "brl";
        case Strategy::all: return "all";
    }
    return "?";
}

Strategy strategy_from_name(const std::string& name) {
    if (name == "bcl") return Strategy::bcl;
    if (name == "pbcl") return Strategy::pbcl;
    if (name == "brl") return Strategy::brl;
    if (name == "all") return Strategy::all;
    throw ParameterError("unknown strategy: " + name);
}

void NnodhConfig::validate() const {
    if (!(alpha > 0 && alpha < 1)) throw ParameterError("alpha must be in (0,1)");
    if (stop_window < 3 || stop_window % 2 == 0) {
        throw ParameterError("stop window must be odd and >= 3");
    }
    if (max_iterations < stop_window) {
        throw ParameterError("max_iterations must be >= stop_window");
    }
}

mds::ExtraConstraints next_constraints(Strategy strategy, double alpha,
                                       const mds::ScheduleSolution& prev, int iteration,
                                       const mds::MicrogridConfig& config) {
    if (iteration < 2) throw ParameterError("constraints are generated from iteration 2 on");
    if (!(alpha > 0 && alpha < 1)) throw ParameterError("alpha must be in (0,1)");
    const double dt = config.dt;
    mds::ExtraConstraints extra;
    if (strategy == Strategy::bcl || strategy == Strategy::all) {
        extra.throughput_cap = (1.0 - alpha) * prev.throughput_kwh(dt);
    }
    if (strategy == Strategy::pbcl || strategy == Strategy::all) {
        std::vector<int> order(static_cast<std::size_t>(prev.intervals));
        std::iota(order.begin(), order.end(), 0);
        auto power = [&](int t) {
            std::size_t ut = static_cast<std::size_t>(t);
            return prev.charge[ut] + prev.discharge[ut];
        };
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return power(a) > power(b); });
        mds::Top3Cap cap;
        double top_sum = 0;
        for (int k = 0; k < 3; ++k) {
            cap.intervals[static_cast<std::size_t>(k)] = order[static_cast<std::size_t>(k)];
            top_sum += power(order[static_cast<std::size_t>(k)]) * dt;
        }
        cap.cap = (1.0 - alpha) * top_sum;
        extra.top3 = cap;
    }
    if (strategy == Strategy::brl || strategy == Strategy::all) {
        extra.power_cap = config.bess.p_max * std::pow(1.0 - alpha, iteration - 1);
    }
    return extra;
}

StopCheck check_stop(const std::vector<double>& totals, double last_throughput,
                     int max_iterations, int window) {
    const int n = static_cast<int>(totals.size());
    if (last_throughput <= 1e-9) return {true, "zero throughput"};
    if (n >= window) {
        const int diffs = window - 1;
        bool ok = true;
        for (int k = 0; k < diffs && ok; ++k) {
            double d = totals[static_cast<std::size_t>(n - window + k + 1)] -
                       totals[static_cast<std::size_t>(n - window + k)];
            ok = (k < diffs / 2) ? (d < 0) : (d > 0);
        }
        if (ok) return {true, "cost window turned upward"};
        // The symmetric window can never match when the minimum falls before
        // the window's center (fast tightening); a sustained rising tail is
        // an equally clear sign that the valley has been passed.
        const int tail = diffs / 2;
        bool rising = true;
        for (int k = 0; k < tail && rising; ++k) {
            rising = totals[static_cast<std::size_t>(n - 1 - k)] >
                     totals[static_cast<std::size_t>(n - 2 - k)];
        }
        if (rising) return {true, "cost tail rising"};
    }
    if (n >= max_iterations) return {true, "iteration cap"};
    return {false, {}};
}

namespace {

IterationRecord evaluate_iteration(int index, mds::ScheduleSolution&& sol,
                                   const mds::MicrogridConfig& config,
                                   const nnbd::DegradationModel& model,
                                   const cbup::DegradationCostParams& cost_params,
                                   const mds::ExtraConstraints& extra) {
    IterationRecord rec;
    rec.index = index;
    rec.cycles = cbup::aggregate_cycles(sol, config);
    rec.bd = cbup::estimate_degradation(model, rec.cycles, config.bess.soh);
    rec.throughput_kwh = sol.throughput_kwh(config.dt);
    rec.operation_cost = sol.operation_cost;
    rec.degradation_cost = cbup::degradation_cost(cost_params, rec.bd);
    rec.total_cost = rec.operation_cost + rec.degradation_cost;
    rec.throughput_cap = extra.throughput_cap;
    if (extra.top3) rec.top3_cap = extra.top3->cap;
    rec.power_cap = extra.power_cap;
    rec.solution = std::move(sol);
    return rec;
}

int argmin_total(const std::vector<IterationRecord>& trace) {
    int best = 1;
    for (const auto& r : trace) {
        if (r.total_cost < trace[static_cast<std::size_t>(best - 1)].total_cost) best = r.index;
    }
    return best;
}

}  // namespace

NnodhResult run(const mds::MicrogridConfig& config, const nnbd::DegradationModel& model,
                const NnodhConfig& nnodh, const cbup::DegradationCostParams& cost_params,
                const milp::SolveOptions& options) {
    nnodh.validate();
    cost_params.validate();
    if (!model.trained) throw StateError("degradation model is untrained");

    NnodhResult result;
    std::vector<double> totals;
    for (int iteration = 1;; ++iteration) {
        mds::ExtraConstraints extra;
        if (iteration > 1) {
            extra = next_constraints(nnodh.strategy, nnodh.alpha,
                                     result.trace.back().solution, iteration, config);
        }
        mds::ScheduleSolution sol;
        try {
            sol = mds::solve_mds(config, extra, options);
        } catch (const InfeasibleError& e) {
            if (iteration == 1) throw;
            result.stop_reason = "restriction infeasible";
            break;
        } catch (const std::exception& e) {
            throw StateError("iteration " + std::to_string(iteration) + ": " + e.what());
        }
        result.trace.push_back(evaluate_iteration(iteration, std::move(sol), config, model,
                                                  cost_params, extra));
        totals.push_back(result.trace.back().total_cost);
        StopCheck stop = check_stop(totals, result.trace.back().throughput_kwh,
                                    nnodh.max_iterations, nnodh.stop_window);
        if (stop.stop) {
            result.stop_reason = stop.reason;
            break;
        }
    }
    result.best_index = argmin_total(result.trace);
    result.metrics = compute_metrics(result.trace, result.best_index);
    return result;
}

Metrics compute_metrics(const std::vector<IterationRecord>& trace, int best_index) {
    if (trace.empty()) throw ParameterError("trace must be non-empty");
    if (best_index < 1 || best_index > static_cast<int>(trace.size())) {
        throw ParameterError("best_index outside trace");
    }
    const IterationRecord& first = trace.front();
    const IterationRecord& best = trace[static_cast<std::size_t>(best_index - 1)];
    const double bdc_max = first.degradation_cost;
    const double tc_max = first.total_cost;
    const double oc_min = first.operation_cost;

    Metrics m;
    if (bdc_max > 0) {
        m.dcr = (bdc_max - best.degradation_cost) / bdc_max * 100.0;
    } else {
        m.dcr = std::numeric_limits<double>::quiet_NaN();
        m.dcr_defined = false;
    }
    m.tcr = tc_max == 0 ? 0.0 : (tc_max - best.total_cost) / tc_max * 100.0;
    m.oci = oc_min == 0 ? 0.0 : (best.operation_cost - oc_min) / oc_min * 100.0;
    return m;
}

std::vector<BenchmarkRow> compare_benchmarks(const mds::MicrogridConfig& config,
                                             const nnbd::DegradationModel& model,
                                             const cbup::DegradationCostParams& cost_params,
                                             const BenchmarkConfig& bench,
                                             const milp::SolveOptions& options) {
    cost_params.validate();
    auto evaluate = [&](const std::string& name, const mds::ScheduleSolution& sol) {
        BenchmarkRow row;
        row.name = name;
        auto cycles = cbup::aggregate_cycles(sol, config);
        row.daily_bd = cbup::estimate_degradation(model, cycles, config.bess.soh);
        row.operation_cost = sol.operation_cost;
        row.daily_deg_cost = cbup::degradation_cost(cost_params, row.daily_bd);
        row.total_cost = row.operation_cost + row.daily_deg_cost;
        row.throughput_kwh = sol.throughput_kwh(config.dt);
        row.annual_deg_cost = row.daily_deg_cost * 365.0;
        row.lifetime_years = row.daily_bd > 0
                                 ? cbup::expected_lifetime(row.daily_bd, config.bess.soh,
                                                           cost_params.soh_eol)
                                 : std::numeric_limits<double>::infinity();
        return row;
    };

    std::vector<BenchmarkRow> rows;
    rows.push_back(evaluate("mds", mds::solve_mds(config, {}, options)));

    mds::ExtraConstraints cycle_limit;
    cycle_limit.cycle_transition_limit = bench.cycle_limit;
    rows.push_back(evaluate("cycle-limit", mds::solve_mds(config, cycle_limit, options)));

    mds::ExtraConstraints linear;
    linear.linear_bdc_rate = bench.linear_bdc_rate;
    rows.push_back(evaluate("linear-bdc", mds::solve_mds(config, linear, options)));

    NnodhResult nn = run(config, model, bench.nnodh, cost_params, options);
    rows.push_back(evaluate("nnodh", nn.trace[static_cast<std::size_t>(nn.best_index - 1)].solution));

    for (auto& row : rows) row.annual_saving = (rows.front().total_cost - row.total_cost) * 365.0;
    return rows;
}

std::string trace_csv(const NnodhResult& result) {
    std::string out =
        "iteration,op_cost,bd,deg_cost,total_cost,throughput_kwh,throughput_cap,top3_cap,"
        "power_cap\n";
    auto opt = [&](std::string& s, const std::optional<double>& v) {
        s += ',';
        if (v) io::append_double(s, *v);
    };
    for (const auto& r : result.trace) {
        out += std::to_string(r.index);
        for (double v : {r.operation_cost, r.bd, r.degradation_cost, r.total_cost,
                         r.throughput_kwh}) {
            out += ',';
            io::append_double(out, v);
        }
        opt(out, r.throughput_cap);
        opt(out, r.top3_cap);
        opt(out, r.power_cap);
        out += '\n';
    }
    return out;
}

std::string summary_json(const NnodhResult& result) {
    nlohmann::ordered_json j;
    j["iterations"] = result.trace.size();
    j["best_index"] = result.best_index;
    j["stop_reason"] = result.stop_reason;
    j["metrics"]["dcr_percent"] =
        result.metrics.dcr_defined ? nlohmann::ordered_json(result.metrics.dcr)
                                   : nlohmann::ordered_json(nullptr);
    j["metrics"]["tcr_percent"] = result.metrics.tcr;
    j["metrics"]["oci_percent"] = result.metrics.oci;
    const auto& best = result.trace[static_cast<std::size_t>(result.best_index - 1)];
    j["best"]["operation_cost"] = best.operation_cost;
    j["best"]["degradation_cost"] = best.degradation_cost;
    j["best"]["total_cost"] = best.total_cost;
    j["best"]["bd"] = best.bd;
    j["best"]["throughput_kwh"] = best.throughput_kwh;
    return j.dump(2) + "\n";
}

std::string benchmarks_csv(const std::vector<BenchmarkRow>& rows) {
    std::string out =
        "model,op_cost,daily_bd,daily_deg_cost,total_cost,throughput_kwh,annual_deg_cost,"
        "annual_saving,lifetime_years\n";
    for (const auto& r : rows) {
        out += r.name;
        for (double v : {r.operation_cost, r.daily_bd, r.daily_deg_cost, r.total_cost,
                         r.throughput_kwh, r.annual_deg_cost, r.annual_saving,
                         r.lifetime_years}) {
            out += ',';
            io::append_double(out, v);
        }
        out += '\n';
    }
    return out;
}

}  // namespace bdms::nnodh
