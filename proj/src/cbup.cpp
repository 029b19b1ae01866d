#include "bdms/cbup.hpp"

#include <cmath>

#include "bdms/errors.hpp"
#include "bdms/io_util.hpp"

namespace bdms::cbup {

void DegradationCostParams::validate() const {
    if (!(soh_eol > 0 && soh_eol < 1)) throw ParameterError("soh_eol must be in (0,1)");
    if (!(capital >= salvage && salvage >= 0)) {
        throw ParameterError("requires capital >= salvage >= 0");
    }
}

std::vector<AggregatedCycle> aggregate_cycles(const mds::ScheduleSolution& sol,
                                              const mds::MicrogridConfig& config,
                                              double power_floor) {
    const int T = sol.intervals;
    const double e_max = config.bess.e_max;
    const double soc_initial = config.bess.e_initial / e_max;
    auto soc_before = [&](int t) { return t == 0 ? soc_initial : sol.soc[static_cast<std::size_t>(t - 1)]; };

    std::vector<AggregatedCycle> out;
    int run_start = -1;
    bool run_charge = false;
    double power_sum = 0, temp_weight = 0;

    auto close_run = [&](int end_t) {
        if (run_start < 0) return;
        AggregatedCycle c;
        c.start_t = run_start;
        c.end_t = end_t;
        c.is_charge = run_charge;
        c.avg_power = power_sum / static_cast<double>(end_t - run_start);
        c.c_rate = c.avg_power / e_max;
        c.soc_start = soc_before(run_start);
        c.dod = std::abs(sol.soc[static_cast<std::size_t>(end_t - 1)] - c.soc_start);
        c.temp = temp_weight / power_sum;
        out.push_back(c);
        run_start = -1;
        power_sum = temp_weight = 0;
    };

    for (int t = 0; t < T; ++t) {
        std::size_t ut = static_cast<std::size_t>(t);
        double pc = sol.charge[ut], pd = sol.discharge[ut];
        bool charging = pc > power_floor, discharging = pd > power_floor;
        if (!charging && !discharging) {
            close_run(t);
            continue;
        }
        double p = charging ? pc : pd;
        if (run_start >= 0 && charging != run_charge) close_run(t);
        if (run_start < 0) {
            run_start = t;
            run_charge = charging;
        }
        power_sum += p;
        temp_weight += p * config.profiles.temp[ut];
    }
    close_run(T);
    return out;
}

std::vector<Eigen::Matrix<double, 5, 1>> per_interval_features(const mds::ScheduleSolution& sol,
                                                               const mds::MicrogridConfig& config,
                                                               double power_floor) {
    const double soc_initial = config.bess.e_initial / config.bess.e_max;
    std::vector<Eigen::Matrix<double, 5, 1>> out;
    for (int t = 0; t < sol.intervals; ++t) {
        std::size_t ut = static_cast<std::size_t>(t);
        if (sol.charge[ut] <= power_floor && sol.discharge[ut] <= power_floor) continue;
        double soc_prev = t == 0 ? soc_initial : sol.soc[ut - 1];
        double dod = std::abs(sol.soc[ut] - soc_prev);
        Eigen::Matrix<double, 5, 1> x;
        x << config.profiles.temp[ut], dod / config.dt, soc_prev, dod, config.bess.soh;
        out.push_back(x);
    }
    return out;
}

double total_bd(std::vector<AggregatedCycle>& cycles, double soh, const RelativeLossFn& predict) {
    double bd = 0;
    for (auto& c : cycles) {
        Eigen::Matrix<double, 5, 1> x;
        x << c.temp, c.c_rate, c.soc_start, c.dod, soh;
        c.predicted_bd = predict(x) * soh;
        bd += c.predicted_bd;
    }
    return bd;
}

double estimate_degradation(const nnbd::DegradationModel& model,
                            std::vector<AggregatedCycle>& cycles, double soh) {
    if (!model.trained) throw StateError("degradation model is untrained");
    return total_bd(cycles, soh,
                    [&](const Eigen::Matrix<double, 5, 1>& x) { return nnbd::forward(model, x); });
}

double estimate_degradation_per_interval(const nnbd::DegradationModel& model,
                                         const mds::ScheduleSolution& sol,
                                         const mds::MicrogridConfig& config) {
    if (!model.trained) throw StateError("degradation model is untrained");
    double bd = 0;
    for (const auto& x : per_interval_features(sol, config)) {
        bd += nnbd::forward(model, x) * config.bess.soh;
    }
    return bd;
}

double degradation_cost(const DegradationCostParams& params, double bd) {
    params.validate();
    if (bd < 0) throw ParameterError("degradation must be >= 0");
    return (params.capital - params.salvage) / (1.0 - params.soh_eol) * bd;
}

double expected_lifetime(double daily_bd, double soh_now, double soh_eol) {
    if (!(daily_bd > 0)) throw ParameterError("daily degradation must be > 0");
    return (soh_now - soh_eol) / daily_bd / 365.0;
}

std::string cycles_csv(const std::vector<AggregatedCycle>& cycles) {
    std::string out = "start_t,end_t,direction,avg_power_kw,c_rate,soc_start,dod,temp_c,predicted_bd\n";
    for (const auto& c : cycles) {
        out += std::to_string(c.start_t) + ',' + std::to_string(c.end_t) + ',';
        out += c.is_charge ? "charge" : "discharge";
        for (double v : {c.avg_power, c.c_rate, c.soc_start, c.dod, c.temp, c.predicted_bd}) {
            out += ',';
            io::append_double(out, v);
        }
        out += '\n';
    }
    return out;
}

}  // namespace bdms::cbup
