#ifndef BDMS_MDS_HPP
#define BDMS_MDS_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bdms/milp.hpp"

namespace bdms::mds {

struct GeneratorSpec {
    double p_max = 180.0;       // kW
    double p_min = 30.0;        // kW
    double ramp = 90.0;         // kW/h
    double cost_linear = 0.30;  // $/kWh
    double cost_noload = 3.0;   // $/h while committed
    double cost_startup = 15.0; // $ per start
    bool initial_on = false;

    void validate() const;
};

struct BessSpec {
    double e_max = 300.0;    // kWh
    double e_min = 30.0;     // kWh
    double p_max = 150.0;    // kW
    double p_min = 0.0;      // kW (0 keeps idle feasible)
    double eff_char = 0.9;
    double eff_disc = 0.9;
    double e_initial = 150.0;  // kWh
    double soh = 1.0;

    void validate() const;
};

struct Profiles {
    std::vector<double> load;       // kW
    std::vector<double> wind;       // kW
    std::vector<double> pv;         // kW
    std::vector<double> buy_price;  // $/kWh
    std::vector<double> temp;       // degC
    double sell_factor = 0.8;       // sell price = factor * buy price

    int intervals() const { return static_cast<int>(load.size()); }
    void validate() const;
};

struct MicrogridConfig {
    std::vector<GeneratorSpec> generators;
    BessSpec bess;
    double tie_max = 500.0;    // kW
    double reserve_frac = 0.10;
    double dt = 1.0;           // hours per interval
    Profiles profiles;

    void validate() const;
};

// Battery-usage restrictions layered onto the base schedule model; empty
// means the traditional problem, populated means a conserved variant.
struct Top3Cap {
    std::array<int, 3> intervals;  // 0-based, distinct
    double cap;                    // kWh over the three intervals
};

struct ExtraConstraints {
    std::optional<double> throughput_cap;        // kWh over the horizon
    std::optional<Top3Cap> top3;
    std::optional<double> power_cap;             // kW on charge and discharge
    std::optional<int> cycle_transition_limit;   // status changes per family
    std::optional<double> linear_bdc_rate;       // $/kWh of battery throughput

    bool empty() const {
        return !throughput_cap && !top3 && !power_cap && !cycle_transition_limit &&
               !linear_bdc_rate;
    }
    void validate(int intervals) const;
};

struct ScheduleSolution {
    int intervals = 0;
    std::vector<std::vector<double>> gen_power;    // [gen][t] kW
    std::vector<std::vector<int>> gen_on;          // [gen][t]
    std::vector<std::vector<int>> gen_startup;     // [gen][t]
    std::vector<double> buy, sell;                 // kW
    std::vector<double> charge, discharge;         // kW
    std::vector<int> u_char, u_disc;               // battery mode indicators
    std::vector<double> energy;                    // kWh at end of interval t
    std::vector<double> soc;                       // energy / e_max
    double operation_cost = 0.0;  // schedule-model objective value, $
    double gap = 0.0;
    std::string status = "optimal";

    double throughput_kwh(double dt) const;  // sum of |power| * dt
};

ScheduleSolution solve_mds(const MicrogridConfig& config, const ExtraConstraints& extra = {},
                           const milp::SolveOptions& options = {});

struct Residual {
    std::string name;
    double value;
};

struct ValidationReport {
    std::vector<Residual> residuals;      // every checked family, worst case
    double max_residual = 0.0;
    double objective_recomputed = 0.0;
    bool ok = false;

    std::vector<Residual> violations(double tol = 1e-6) const;
};

ValidationReport validate_solution(const MicrogridConfig& config, const ScheduleSolution& sol,
                                   const ExtraConstraints& extra = {});

// Operation cost of a given schedule (the base objective, excluding any
// linear battery-usage surcharge).
double operation_cost(const MicrogridConfig& config, const ScheduleSolution& sol);

// Exhaustive oracle for small instances: per interval the battery power is
// drawn from `battery_levels` (signed kW, positive = charge) and each
// generator's output from `gen_levels` (0 means off). At most one generator.
struct BruteForceResult {
    bool feasible = false;
    double cost = 0.0;
    std::vector<double> battery;  // signed kW chosen per interval
    std::vector<double> gen;      // kW per interval (empty when no generator)
};

BruteForceResult brute_force_schedule(const MicrogridConfig& config,
                                      const std::vector<double>& battery_levels,
                                      const std::vector<double>& gen_levels,
                                      std::int64_t enumeration_cap = 10'000'000);

// Scenario files: JSON for the config, CSV for the profiles
// (hour, load_kw, wind_kw, pv_kw, buy_price, temp_c).
std::string scenario_json(const MicrogridConfig& config);
MicrogridConfig scenario_from_json(const std::string& text);
std::string profiles_csv(const Profiles& p);
Profiles profiles_from_csv(const std::string& text, double sell_factor = 0.8);

// Solution files: per-interval CSV plus a JSON summary.
std::string solution_csv(const ScheduleSolution& sol);
std::string solution_summary_json(const ScheduleSolution& sol);

}  // namespace bdms::mds

#endif
