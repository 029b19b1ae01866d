#ifndef BDMS_CBUP_HPP
#define BDMS_CBUP_HPP

#include <functional>
#include <string>
#include <vector>

#include "bdms/mds.hpp"
#include "bdms/nnbd.hpp"

namespace bdms::cbup {

// One maximal run of same-direction battery operation. Interval range is
// [start_t, end_t) half-open; temp is the power-weighted mean ambient
// temperature over the run.
struct AggregatedCycle {
    int start_t = 0;
    int end_t = 0;
    bool is_charge = false;
    double avg_power = 0.0;   // kW
    double c_rate = 0.0;      // avg_power / e_max, 1/h
    double soc_start = 0.0;   // SOC entering start_t
    double dod = 0.0;         // |SOC(end) - SOC(start)|
    double temp = 0.0;        // degC
    double predicted_bd = 0.0;  // filled by estimate_degradation
};

struct DegradationCostParams {
    double capital = 120000.0;  // $ (unit price x rated energy)
    double salvage = 0.0;       // $
    double soh_eol = 0.7;       // lifetime-accounting end-of-life SOH

    void validate() const;
};

// Scans the schedule: consecutive intervals with same-direction power above
// power_floor form one cycle; idle intervals and direction changes terminate
// the current run.
std::vector<AggregatedCycle> aggregate_cycles(const mds::ScheduleSolution& sol,
                                              const mds::MicrogridConfig& config,
                                              double power_floor = 1e-6);

// Per-interval feature rows (temp, c_rate, soc, dod, soh), one per non-idle
// interval; the naive alternative to cycle aggregation.
std::vector<Eigen::Matrix<double, 5, 1>> per_interval_features(const mds::ScheduleSolution& sol,
                                                               const mds::MicrogridConfig& config,
                                                               double power_floor = 1e-6);

// Total battery degradation (SOH fraction) for a cycle list under an
// arbitrary per-cycle predictor of relative degradation; each prediction is
// scaled by the start-of-day SOH and recorded in the cycle's predicted_bd.
using RelativeLossFn = std::function<double(const Eigen::Matrix<double, 5, 1>&)>;
double total_bd(std::vector<AggregatedCycle>& cycles, double soh, const RelativeLossFn& predict);

// NN estimate over aggregated cycles (the CBUP path).
double estimate_degradation(const nnbd::DegradationModel& model,
                            std::vector<AggregatedCycle>& cycles, double soh);

// NN estimate over per-interval features (the naive path).
double estimate_degradation_per_interval(const nnbd::DegradationModel& model,
                                         const mds::ScheduleSolution& sol,
                                         const mds::MicrogridConfig& config);

// cost = (capital - salvage) / (1 - soh_eol) * bd.
double degradation_cost(const DegradationCostParams& params, double bd);

// years = (soh_now - soh_eol) / daily_bd / 365.
double expected_lifetime(double daily_bd, double soh_now, double soh_eol);

std::string cycles_csv(const std::vector<AggregatedCycle>& cycles);

}  // namespace bdms::cbup

#endif
