#ifndef BDMS_NNODH_HPP
#define BDMS_NNODH_HPP

#include <optional>
#include <string>
#include <vector>

#include "bdms/cbup.hpp"
#include "bdms/mds.hpp"
#include "bdms/nnbd.hpp"

namespace bdms::nnodh {

enum class Strategy { bcl, pbcl, brl, all };

const char* strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);

struct NnodhConfig {
    Strategy strategy = Strategy::bcl;
    double alpha = 0.03;       // per-iteration tightening fraction
    int max_iterations = 200;
    int stop_window = 11;      // totals in the window; differences = window - 1

    void validate() const;
};

struct IterationRecord {
    int index = 0;  // 1-based; index 1 is the unconstrained solve
    mds::ScheduleSolution solution;
    std::vector<cbup::AggregatedCycle> cycles;
    double throughput_kwh = 0.0;
    double bd = 0.0;
    double operation_cost = 0.0;
    double degradation_cost = 0.0;
    double total_cost = 0.0;
    std::optional<double> throughput_cap;  // active caps, if any
    std::optional<double> top3_cap;
    std::optional<double> power_cap;
};

struct Metrics {
    double dcr = 0.0;  // % ; NaN when BDC_max = 0 (see dcr_defined)
    double tcr = 0.0;  // %
    double oci = 0.0;  // %
    bool dcr_defined = true;
};

struct NnodhResult {
    std::vector<IterationRecord> trace;
    int best_index = 1;  // 1-based argmin of total cost
    Metrics metrics;
    std::string stop_reason;
};

// Tightened battery constraints for the given iteration (>= 2), derived from
// the previous iteration's schedule.
mds::ExtraConstraints next_constraints(Strategy strategy, double alpha,
                                       const mds::ScheduleSolution& prev, int iteration,
                                       const mds::MicrogridConfig& config);

struct StopCheck {
    bool stop = false;
    std::string reason;
};

// Window rule over the trace of total costs: with the last `window` totals,
// the first half of the differences all negative and the second half all
// positive; plus the iteration cap and the zero-throughput safety stop.
StopCheck check_stop(const std::vector<double>& totals, double last_throughput,
                     int max_iterations, int window);

NnodhResult run(const mds::MicrogridConfig& config, const nnbd::DegradationModel& model,
                const NnodhConfig& nnodh, const cbup::DegradationCostParams& cost_params,
                const milp::SolveOptions& options = {});

Metrics compute_metrics(const std::vector<IterationRecord>& trace, int best_index);

struct BenchmarkRow {
    std::string name;
    double operation_cost = 0.0;
    double daily_bd = 0.0;          // NN estimate on the final schedule
    double daily_deg_cost = 0.0;
    double total_cost = 0.0;
    double throughput_kwh = 0.0;
    double annual_deg_cost = 0.0;   // daily x 365
    double annual_saving = 0.0;     // total-cost saving vs the first row, x 365
    double lifetime_years = 0.0;
};

struct BenchmarkConfig {
    double linear_bdc_rate = 0.005;  // $/kWh for the linear-usage-cost model
    int cycle_limit = 2;            // status changes per family
    NnodhConfig nnodh;
};

// Traditional schedule, cycle-limited schedule, linear-usage-cost schedule,
// and the iterative heuristic, each evaluated ex post with the same model.
std::vector<BenchmarkRow> compare_benchmarks(const mds::MicrogridConfig& config,
                                             const nnbd::DegradationModel& model,
                                             const cbup::DegradationCostParams& cost_params,
                                             const BenchmarkConfig& bench = {},
                                             const milp::SolveOptions& options = {});

std::string trace_csv(const NnodhResult& result);
std::string summary_json(const NnodhResult& result);
std::string benchmarks_csv(const std::vector<BenchmarkRow>& rows);

}  // namespace bdms::nnodh

#endif
