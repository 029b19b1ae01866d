#include "bdms/mds.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "bdms/errors.hpp"
#include "bdms/io_util.hpp"
#include "json.hpp"

namespace bdms::mds {

namespace {

constexpr int kMaxIntervals = 96;  // size guard

void require(bool ok, const std::string& msg) {
    if (!ok) throw DomainError(msg);
}

}  // namespace

void GeneratorSpec::validate() const {
    require(p_min >= 0 && p_min <= p_max, "generator requires 0 <= p_min <= p_max");
    require(ramp > 0, "generator ramp must be > 0");
    require(cost_linear >= 0 && cost_noload >= 0 && cost_startup >= 0,
            "generator costs must be >= 0");
}

void BessSpec::validate() const {
    require(e_min >= 0 && e_min < e_max, "BESS requires 0 <= e_min < e_max");
    require(p_min >= 0 && p_min <= p_max, "BESS requires 0 <= p_min <= p_max");
    require(eff_char > 0 && eff_char <= 1 && eff_disc > 0 && eff_disc <= 1,
            "BESS efficiencies must be in (0,1]");
    require(e_initial >= e_min && e_initial <= e_max,
            "BESS requires e_min <= e_initial <= e_max");
    require(soh > 0 && soh <= 1, "BESS soh must be in (0,1]");
}

void Profiles::validate() const {
    require(!load.empty(), "profiles must be non-empty");
    require(wind.size() == load.size() && pv.size() == load.size() &&
                buy_price.size() == load.size() && temp.size() == load.size(),
            "profile series must have equal lengths");
    require(sell_factor >= 0, "sell factor must be >= 0");
    for (double p : buy_price) require(p >= 0, "buy prices must be >= 0");
    for (double v : load) require(v >= 0, "load must be >= 0");
    for (double v : wind) require(v >= 0, "wind must be >= 0");
    for (double v : pv) require(v >= 0, "pv must be >= 0");
}

void MicrogridConfig::validate() const {
    for (const auto& g : generators) g.validate();
    bess.validate();
    profiles.validate();
    require(dt > 0, "dt must be > 0");
    require(tie_max >= 0, "tie_max must be >= 0");
    require(reserve_frac >= 0 && reserve_frac < 1, "reserve_frac must be in [0,1)");
    if (profiles.intervals() > kMaxIntervals) {
        throw ParameterError("horizon exceeds the size guard of " +
                             std::to_string(kMaxIntervals) + " intervals");
    }
}

void ExtraConstraints::validate(int intervals) const {
    if (throughput_cap && *throughput_cap < 0) throw ParameterError("throughput cap must be >= 0");
    if (power_cap && *power_cap < 0) throw ParameterError("power cap must be >= 0");
    if (cycle_transition_limit && *cycle_transition_limit < 0) {
        throw ParameterError("cycle transition limit must be >= 0");
    }
    if (linear_bdc_rate && *linear_bdc_rate < 0) throw ParameterError("usage rate must be >= 0");
    if (top3) {
        if (top3->cap < 0) throw ParameterError("top-3 cap must be >= 0");
        std::set<int> seen;
        for (int t : top3->intervals) {
            if (t < 0 || t >= intervals) throw ParameterError("top-3 interval out of range");
            if (!seen.insert(t).second) throw ParameterError("top-3 intervals must be distinct");
        }
    }
}

double ScheduleSolution::throughput_kwh(double dt) const {
    double s = 0;
    for (int t = 0; t < intervals; ++t) s += (charge[t] + discharge[t]) * dt;
    return s;
}

namespace {

// Column layout bookkeeping for one build of the schedule model.
struct VarMap {
    int T = 0, G = 0;
    std::vector<std::vector<int>> pg, ug, vg;  // [gen][t]
    std::vector<int> buy, ubuy, sell, usell;
    std::vector<int> pc, uc, pd, ud;  // charge/discharge power + status
    std::vector<int> energy;          // E at end of interval t
    std::vector<int> vtrans_c, vtrans_d;  // cycle-transition indicators (t >= 1)
};

VarMap build_model(const MicrogridConfig& cfg, const ExtraConstraints& extra, milp::Model& m) {
    const int T = cfg.profiles.intervals();
    const int G = static_cast<int>(cfg.generators.size());
    const double dt = cfg.dt;
    const auto& b = cfg.bess;

    VarMap v;
    v.T = T;
    v.G = G;
    double bess_pcap = b.p_max;
    if (extra.power_cap) bess_pcap = std::min(bess_pcap, *extra.power_cap);

    v.pg.resize(G);
    v.ug.resize(G);
    v.vg.resize(G);
    for (int g = 0; g < G; ++g) {
        const auto& gen = cfg.generators[static_cast<std::size_t>(g)];
        for (int t = 0; t < T; ++t) {
            v.pg[g].push_back(m.add_var(0, gen.p_max, dt * gen.cost_linear, false, "pg"));
            v.ug[g].push_back(m.add_var(0, 1, dt * gen.cost_noload, true, "ug"));
            v.vg[g].push_back(m.add_var(0, 1, gen.cost_startup, false, "vg"));
        }
    }
    const double usage_rate = extra.linear_bdc_rate.value_or(0.0);
    for (int t = 0; t < T; ++t) {
        double cb = cfg.profiles.buy_price[static_cast<std::size_t>(t)];
        double cs = cfg.profiles.sell_factor * cb;
        v.buy.push_back(m.add_var(0, cfg.tie_max, dt * cb, false, "buy"));
        v.ubuy.push_back(m.add_var(0, 1, 0, true, "ubuy"));
        v.sell.push_back(m.add_var(0, cfg.tie_max, -dt * cs, false, "sell"));
        v.usell.push_back(m.add_var(0, 1, 0, true, "usell"));
        v.pc.push_back(m.add_var(0, bess_pcap, dt * usage_rate, false, "pc"));
        v.uc.push_back(m.add_var(0, 1, 0, true, "uc"));
        v.pd.push_back(m.add_var(0, bess_pcap, dt * usage_rate, false, "pd"));
        v.ud.push_back(m.add_var(0, 1, 0, true, "ud"));
        bool last = (t == T - 1);
        v.energy.push_back(m.add_var(last ? b.e_initial : b.e_min,
                                     last ? b.e_initial : b.e_max, 0, false, "E"));
    }

    for (int g = 0; g < G; ++g) {
        const auto& gen = cfg.generators[static_cast<std::size_t>(g)];
        for (int t = 0; t < T; ++t) {
            // Committed power window.
            m.add_row(0, milp::kInf).terms = {{v.pg[g][t], 1.0}, {v.ug[g][t], -gen.p_min}};
            m.add_row(-milp::kInf, 0).terms = {{v.pg[g][t], 1.0}, {v.ug[g][t], -gen.p_max}};
            // Startup linking.
            if (t == 0) {
                double u0 = gen.initial_on ? 1.0 : 0.0;
                m.add_row(-u0, milp::kInf).terms = {{v.vg[g][t], 1.0}, {v.ug[g][t], -1.0}};
            } else {
                m.add_row(0, milp::kInf).terms =
                    {{v.vg[g][t], 1.0}, {v.ug[g][t], -1.0}, {v.ug[g][t - 1], 1.0}};
            }
            // Ramping between consecutive intervals.
            if (t > 0) {
                m.add_row(-dt * gen.ramp, dt * gen.ramp).terms =
                    {{v.pg[g][t], 1.0}, {v.pg[g][t - 1], -1.0}};
            }
        }
    }

    for (int t = 0; t < T; ++t) {
        double net_load = cfg.profiles.load[static_cast<std::size_t>(t)] -
                          cfg.profiles.wind[static_cast<std::size_t>(t)] -
                          cfg.profiles.pv[static_cast<std::size_t>(t)];
        // Power balance.
        auto& bal = m.add_row(net_load, net_load);
        bal.terms = {{v.buy[t], 1.0}, {v.sell[t], -1.0}, {v.pd[t], 1.0}, {v.pc[t], -1.0}};
        for (int g = 0; g < G; ++g) bal.terms.push_back({v.pg[g][t], 1.0});

        // Grid exchange exclusivity and indicator windows.
        m.add_row(-milp::kInf, 1.0).terms = {{v.ubuy[t], 1.0}, {v.usell[t], 1.0}};
        m.add_row(-milp::kInf, 0).terms = {{v.buy[t], 1.0}, {v.ubuy[t], -cfg.tie_max}};
        m.add_row(-milp::kInf, 0).terms = {{v.sell[t], 1.0}, {v.usell[t], -cfg.tie_max}};

        // Battery mode exclusivity and power windows.
        m.add_row(-milp::kInf, 1.0).terms = {{v.uc[t], 1.0}, {v.ud[t], 1.0}};
        m.add_row(0, milp::kInf).terms = {{v.pc[t], 1.0}, {v.uc[t], -b.p_min}};
        m.add_row(-milp::kInf, 0).terms = {{v.pc[t], 1.0}, {v.uc[t], -bess_pcap}};
        m.add_row(0, milp::kInf).terms = {{v.pd[t], 1.0}, {v.ud[t], -b.p_min}};
        m.add_row(-milp::kInf, 0).terms = {{v.pd[t], 1.0}, {v.ud[t], -bess_pcap}};

        // Stored-energy recursion.
        auto& rec = m.add_row(t == 0 ? b.e_initial : 0.0, t == 0 ? b.e_initial : 0.0);
        rec.terms = {{v.energy[t], 1.0},
                     {v.pc[t], -dt * b.eff_char},
                     {v.pd[t], dt / b.eff_disc}};
        if (t > 0) rec.terms.push_back({v.energy[t - 1], -1.0});

        // Spinning/backup reserve.
        double gen_caps = 0;
        for (const auto& gen : cfg.generators) gen_caps += gen.p_max;
        auto& res = m.add_row(
            cfg.reserve_frac * cfg.profiles.load[static_cast<std::size_t>(t)] - cfg.tie_max -
                gen_caps,
            milp::kInf);
        res.terms = {{v.buy[t], -1.0}, {v.sell[t], 1.0}};
        for (int g = 0; g < G; ++g) res.terms.push_back({v.pg[g][t], -1.0});
    }

    if (extra.throughput_cap) {
        auto& row = m.add_row(-milp::kInf, *extra.throughput_cap);
        for (int t = 0; t < T; ++t) {
            row.terms.push_back({v.pc[t], dt});
            row.terms.push_back({v.pd[t], dt});
        }
    }
    if (extra.top3) {
        auto& row = m.add_row(-milp::kInf, extra.top3->cap);
        for (int t : extra.top3->intervals) {
            row.terms.push_back({v.pc[t], dt});
            row.terms.push_back({v.pd[t], dt});
        }
    }
    if (extra.cycle_transition_limit) {
        // Status-change indicators: V[t] = U[t] XOR U[t-1] for each of the
        // charge and discharge status families, first interval pinned to 0,
        // total changes capped per family.
        auto add_family = [&](const std::vector<int>& u, std::vector<int>& vtrans) {
            auto& cap_row = m.add_row(-milp::kInf,
                                      static_cast<double>(*extra.cycle_transition_limit));
            for (int t = 1; t < T; ++t) {
                int vt = m.add_var(0, 1, 0, false, "vtrans");
                vtrans.push_back(vt);
                m.add_row(-milp::kInf, 0).terms = {{vt, 1.0}, {u[t], -1.0}, {u[t - 1], -1.0}};
                m.add_row(0, milp::kInf).terms = {{vt, 1.0}, {u[t], -1.0}, {u[t - 1], 1.0}};
                m.add_row(0, milp::kInf).terms = {{vt, 1.0}, {u[t], 1.0}, {u[t - 1], -1.0}};
                m.add_row(-milp::kInf, 2.0).terms = {{vt, 1.0}, {u[t], 1.0}, {u[t - 1], 1.0}};
                cap_row.terms.push_back({vt, 1.0});
            }
        };
        add_family(v.uc, v.vtrans_c);
        add_family(v.ud, v.vtrans_d);
    }
    return v;
}

std::string diagnose_infeasibility(const MicrogridConfig& cfg) {
    const int T = cfg.profiles.intervals();
    double gen_caps = 0;
    for (const auto& g : cfg.generators) gen_caps += g.p_max;
    for (int t = 0; t < T; ++t) {
        double supply = cfg.tie_max + gen_caps + cfg.profiles.wind[static_cast<std::size_t>(t)] +
                        cfg.profiles.pv[static_cast<std::size_t>(t)] + cfg.bess.p_max;
        double need = cfg.profiles.load[static_cast<std::size_t>(t)];
        if (need > supply) {
            return "load " + io::format_double(need) + " kW at interval " + std::to_string(t) +
                   " exceeds maximum supply " + io::format_double(supply) + " kW";
        }
        double slack = cfg.tie_max + gen_caps -
                       cfg.reserve_frac * cfg.profiles.load[static_cast<std::size_t>(t)];
        if (slack < 0) {
            return "reserve requirement at interval " + std::to_string(t) +
                   " exceeds tie-line plus generation capacity";
        }
    }
    return "no single-interval aggregate violation found";
}

}  // namespace

ScheduleSolution solve_mds(const MicrogridConfig& config, const ExtraConstraints& extra,
                           const milp::SolveOptions& options) {
    config.validate();
    extra.validate(config.profiles.intervals());

    milp::Model model;
    VarMap v = build_model(config, extra, model);

    milp::Solution milp_sol;
    try {
        milp_sol = milp::solve(model, options);
    } catch (const InfeasibleError& e) {
        throw InfeasibleError(std::string("schedule infeasible (") + e.what() +
                              "); diagnosis: " + diagnose_infeasibility(config));
    }

    const int T = v.T, G = v.G;
    ScheduleSolution sol;
    sol.intervals = T;
    sol.gen_power.resize(static_cast<std::size_t>(G));
    sol.gen_on.resize(static_cast<std::size_t>(G));
    sol.gen_startup.resize(static_cast<std::size_t>(G));
    auto val = [&](int j) { return milp_sol.x(j); };
    auto clean = [](double x) { return std::abs(x) < 1e-9 ? 0.0 : x; };
    for (int g = 0; g < G; ++g) {
        for (int t = 0; t < T; ++t) {
            sol.gen_power[static_cast<std::size_t>(g)].push_back(clean(val(v.pg[g][t])));
            sol.gen_on[static_cast<std::size_t>(g)].push_back(
                static_cast<int>(std::lround(val(v.ug[g][t]))));
            sol.gen_startup[static_cast<std::size_t>(g)].push_back(
                static_cast<int>(std::lround(val(v.vg[g][t]))));
        }
    }
    for (int t = 0; t < T; ++t) {
        sol.buy.push_back(clean(val(v.buy[t])));
        sol.sell.push_back(clean(val(v.sell[t])));
        sol.charge.push_back(clean(val(v.pc[t])));
        sol.discharge.push_back(clean(val(v.pd[t])));
        sol.u_char.push_back(static_cast<int>(std::lround(val(v.uc[t]))));
        sol.u_disc.push_back(static_cast<int>(std::lround(val(v.ud[t]))));
        sol.energy.push_back(val(v.energy[t]));
        sol.soc.push_back(val(v.energy[t]) / config.bess.e_max);
    }
    sol.gap = milp_sol.gap;
    switch (milp_sol.status) {
        case milp::Status::optimal: sol.status = "optimal"; break;
        case milp::Status::node_limit: sol.status = "node_limit"; break;
        case milp::Status::time_limit: sol.status = "time_limit"; break;
        default: sol.status = "unknown"; break;
    }
    sol.operation_cost = operation_cost(config, sol);
    return sol;
}

double operation_cost(const MicrogridConfig& config, const ScheduleSolution& sol) {
    const double dt = config.dt;
    double cost = 0;
    for (std::size_t g = 0; g < config.generators.size(); ++g) {
        const auto& gen = config.generators[g];
        for (int t = 0; t < sol.intervals; ++t) {
            cost += dt * gen.cost_linear * sol.gen_power[g][static_cast<std::size_t>(t)];
            cost += dt * gen.cost_noload * sol.gen_on[g][static_cast<std::size_t>(t)];
            cost += gen.cost_startup * sol.gen_startup[g][static_cast<std::size_t>(t)];
        }
    }
    for (int t = 0; t < sol.intervals; ++t) {
        double cb = config.profiles.buy_price[static_cast<std::size_t>(t)];
        cost += dt * cb * sol.buy[static_cast<std::size_t>(t)];
        cost -= dt * config.profiles.sell_factor * cb * sol.sell[static_cast<std::size_t>(t)];
    }
    return cost;
}

std::vector<Residual> ValidationReport::violations(double tol) const {
    std::vector<Residual> out;
    for (const auto& r : residuals) {
        if (r.value > tol) out.push_back(r);
    }
    return out;
}

ValidationReport validate_solution(const MicrogridConfig& config, const ScheduleSolution& sol,
                                   const ExtraConstraints& extra) {
    config.validate();
    const int T = config.profiles.intervals();
    if (sol.intervals != T) throw ParameterError("solution horizon does not match config");
    const double dt = config.dt;
    const auto& b = config.bess;

    ValidationReport rep;
    auto worst = [&](const std::string& name, double residual) {
        rep.residuals.push_back({name, residual});
    };
    auto acc = [](double& w, double r) { w = std::max(w, r); };

    double r_balance = 0, r_gen = 0, r_ramp = 0, r_grid = 0, r_bess = 0, r_energy = 0,
           r_reserve = 0, r_final = 0, r_extra = 0;
    for (int t = 0; t < T; ++t) {
        std::size_t ut = static_cast<std::size_t>(t);
        double gen_sum = 0;
        for (std::size_t g = 0; g < config.generators.size(); ++g) {
            const auto& gen = config.generators[g];
            double p = sol.gen_power[g][ut];
            int on = sol.gen_on[g][ut];
            gen_sum += p;
            acc(r_gen, on * gen.p_min - p);
            acc(r_gen, p - on * gen.p_max);
            int prev_on = t == 0 ? (gen.initial_on ? 1 : 0) : sol.gen_on[g][ut - 1];
            acc(r_gen, (on - prev_on) - sol.gen_startup[g][ut]);
            if (t > 0) acc(r_ramp, std::abs(p - sol.gen_power[g][ut - 1]) - dt * gen.ramp);
        }
        double net = sol.buy[ut] + gen_sum + config.profiles.wind[ut] + config.profiles.pv[ut] +
                     sol.discharge[ut] - sol.sell[ut] - config.profiles.load[ut] - sol.charge[ut];
        acc(r_balance, std::abs(net));

        bool buying = sol.buy[ut] > 1e-9, selling = sol.sell[ut] > 1e-9;
        acc(r_grid, (buying && selling) ? std::min(sol.buy[ut], sol.sell[ut]) : 0.0);
        acc(r_grid, sol.buy[ut] - config.tie_max);
        acc(r_grid, sol.sell[ut] - config.tie_max);

        bool charging = sol.charge[ut] > 1e-9, discharging = sol.discharge[ut] > 1e-9;
        acc(r_bess, (charging && discharging) ? std::min(sol.charge[ut], sol.discharge[ut]) : 0.0);
        acc(r_bess, sol.charge[ut] - b.p_max);
        acc(r_bess, sol.discharge[ut] - b.p_max);
        if (charging) acc(r_bess, b.p_min - sol.charge[ut]);
        if (discharging) acc(r_bess, b.p_min - sol.discharge[ut]);
        if (sol.u_char.size() == static_cast<std::size_t>(T)) {
            acc(r_bess, sol.charge[ut] - sol.u_char[ut] * b.p_max);
            acc(r_bess, sol.discharge[ut] - sol.u_disc[ut] * b.p_max);
            acc(r_bess, static_cast<double>(sol.u_char[ut] + sol.u_disc[ut] - 1));
        }

        double e_prev = t == 0 ? b.e_initial : sol.energy[ut - 1];
        double e_want = e_prev + dt * (b.eff_char * sol.charge[ut] - sol.discharge[ut] / b.eff_disc);
        acc(r_energy, std::abs(sol.energy[ut] - e_want));
        acc(r_energy, b.e_min - sol.energy[ut]);
        acc(r_energy, sol.energy[ut] - b.e_max);
        acc(r_energy, std::abs(sol.soc[ut] - sol.energy[ut] / b.e_max));

        double headroom = config.tie_max - sol.buy[ut] + sol.sell[ut];
        for (std::size_t g = 0; g < config.generators.size(); ++g) {
            headroom += config.generators[g].p_max - sol.gen_power[g][ut];
        }
        acc(r_reserve, config.reserve_frac * config.profiles.load[ut] - headroom);
    }
    acc(r_final, std::abs(sol.energy[static_cast<std::size_t>(T - 1)] - b.e_initial));

    if (extra.throughput_cap) acc(r_extra, sol.throughput_kwh(dt) - *extra.throughput_cap);
    if (extra.top3) {
        double s = 0;
        for (int t : extra.top3->intervals) {
            s += (sol.charge[static_cast<std::size_t>(t)] +
                  sol.discharge[static_cast<std::size_t>(t)]) *
                 dt;
        }
        acc(r_extra, s - extra.top3->cap);
    }
    if (extra.power_cap) {
        for (int t = 0; t < T; ++t) {
            acc(r_extra, sol.charge[static_cast<std::size_t>(t)] - *extra.power_cap);
            acc(r_extra, sol.discharge[static_cast<std::size_t>(t)] - *extra.power_cap);
        }
    }
    if (extra.cycle_transition_limit) {
        // Transitions are defined on the commitment indicators (a committed
        // interval at zero power is still "in mode"); fall back to inferring
        // status from power when indicators are absent.
        auto status = [&](int t, bool charge_side) -> bool {
            std::size_t ut = static_cast<std::size_t>(t);
            if (charge_side) {
                return sol.u_char.size() == static_cast<std::size_t>(T) ? sol.u_char[ut] != 0
                                                                        : sol.charge[ut] > 1e-9;
            }
            return sol.u_disc.size() == static_cast<std::size_t>(T) ? sol.u_disc[ut] != 0
                                                                    : sol.discharge[ut] > 1e-9;
        };
        int changes_c = 0, changes_d = 0;
        for (int t = 1; t < T; ++t) {
            changes_c += status(t, true) != status(t - 1, true);
            changes_d += status(t, false) != status(t - 1, false);
        }
        acc(r_extra, static_cast<double>(std::max(changes_c, changes_d) -
                                         *extra.cycle_transition_limit));
    }

    worst("power_balance", r_balance);
    worst("generator_window_startup", r_gen);
    worst("generator_ramp", r_ramp);
    worst("grid_exchange", r_grid);
    worst("bess_power", r_bess);
    worst("energy_recursion_bounds", r_energy);
    worst("reserve", r_reserve);
    worst("final_energy", r_final);
    worst("extra_constraints", r_extra);

    rep.max_residual = 0;
    for (const auto& r : rep.residuals) rep.max_residual = std::max(rep.max_residual, r.value);
    rep.objective_recomputed = operation_cost(config, sol);
    double extra_cost = 0;
    if (extra.linear_bdc_rate) extra_cost = *extra.linear_bdc_rate * sol.throughput_kwh(dt);
    bool cost_ok = std::abs(rep.objective_recomputed - sol.operation_cost) <=
                   1e-6 * (1 + std::abs(rep.objective_recomputed));
    (void)extra_cost;  // surcharge is not part of operation_cost by contract
    rep.ok = rep.max_residual <= 1e-6 && cost_ok;
    return rep;
}

BruteForceResult brute_force_schedule(const MicrogridConfig& config,
                                      const std::vector<double>& battery_levels,
                                      const std::vector<double>& gen_levels,
                                      std::int64_t enumeration_cap) {
    config.validate();
    if (config.generators.size() > 1) {
        throw ParameterError("brute force supports at most one generator");
    }
    if (battery_levels.empty()) throw ParameterError("battery level grid must be non-empty");
    const int T = config.profiles.intervals();
    const bool has_gen = !config.generators.empty();
    const std::size_t nb = battery_levels.size();
    const std::size_t ng = has_gen ? gen_levels.size() : 1;
    if (has_gen && gen_levels.empty()) throw ParameterError("generator level grid must be non-empty");

    double combos = 1;
    for (int t = 0; t < T; ++t) combos *= static_cast<double>(nb * ng);
    if (combos > static_cast<double>(enumeration_cap)) {
        throw ParameterError("enumeration size exceeds the cap");
    }

    const auto& b = config.bess;
    const double dt = config.dt;
    GeneratorSpec gen = has_gen ? config.generators[0] : GeneratorSpec{};

    BruteForceResult best;
    best.cost = milp::kInf;
    std::vector<std::size_t> idx(static_cast<std::size_t>(T), 0);
    const std::size_t per_t = nb * ng;

    while (true) {
        double cost = 0, energy = b.e_initial;
        bool feasible = true;
        double prev_gen = 0;
        int prev_on = gen.initial_on ? 1 : 0;
        std::vector<double> bat(static_cast<std::size_t>(T)), gp(static_cast<std::size_t>(T));
        for (int t = 0; t < T && feasible; ++t) {
            std::size_t ut = static_cast<std::size_t>(t);
            double pb = battery_levels[idx[ut] % nb];
            double pgv = has_gen ? gen_levels[idx[ut] / nb] : 0.0;
            bat[ut] = pb;
            gp[ut] = pgv;
            double charge = std::max(0.0, pb), disc = std::max(0.0, -pb);
            if (charge > b.p_max + 1e-12 || disc > b.p_max + 1e-12 ||
                (charge > 1e-12 && charge < b.p_min - 1e-12) ||
                (disc > 1e-12 && disc < b.p_min - 1e-12)) {
                feasible = false;
                break;
            }
            energy += dt * (b.eff_char * charge - disc / b.eff_disc);
            if (energy < b.e_min - 1e-9 || energy > b.e_max + 1e-9) {
                feasible = false;
                break;
            }
            int on = pgv > 1e-12 ? 1 : 0;
            if (has_gen) {
                if (on && (pgv < gen.p_min - 1e-12 || pgv > gen.p_max + 1e-12)) {
                    feasible = false;
                    break;
                }
                if (std::abs(pgv - prev_gen) > dt * gen.ramp + 1e-12) {
                    feasible = false;
                    break;
                }
                cost += dt * gen.cost_linear * pgv + dt * gen.cost_noload * on +
                        gen.cost_startup * std::max(0, on - prev_on);
                prev_gen = pgv;
                prev_on = on;
            }
            double net = config.profiles.load[ut] + charge - disc - pgv -
                         config.profiles.wind[ut] - config.profiles.pv[ut];
            double buy = std::max(0.0, net), sell = std::max(0.0, -net);
            if (buy > config.tie_max + 1e-12 || sell > config.tie_max + 1e-12) {
                feasible = false;
                break;
            }
            double headroom = config.tie_max - buy + sell + (has_gen ? gen.p_max - pgv : 0.0);
            if (headroom < config.reserve_frac * config.profiles.load[ut] - 1e-12) {
                feasible = false;
                break;
            }
            double cb = config.profiles.buy_price[ut];
            cost += dt * (buy * cb - sell * config.profiles.sell_factor * cb);
        }
        if (feasible && std::abs(energy - b.e_initial) > 1e-6) feasible = false;
        if (feasible && cost < best.cost) {
            best.feasible = true;
            best.cost = cost;
            best.battery = bat;
            best.gen = has_gen ? gp : std::vector<double>{};
        }
        // Advance the mixed-radix counter.
        int t = 0;
        while (t < T && ++idx[static_cast<std::size_t>(t)] == per_t) {
            idx[static_cast<std::size_t>(t)] = 0;
            ++t;
        }
        if (t == T) break;
    }
    if (!best.feasible) best.cost = 0;
    return best;
}

namespace {

nlohmann::ordered_json gen_to_json(const GeneratorSpec& g) {
    return {{"p_max", g.p_max},       {"p_min", g.p_min},
            {"ramp", g.ramp},         {"cost_linear", g.cost_linear},
            {"cost_noload", g.cost_noload}, {"cost_startup", g.cost_startup},
            {"initial_on", g.initial_on}};
}

GeneratorSpec gen_from_json(const nlohmann::json& j) {
    GeneratorSpec g;
    g.p_max = j.at("p_max").get<double>();
    g.p_min = j.at("p_min").get<double>();
    g.ramp = j.at("ramp").get<double>();
    g.cost_linear = j.at("cost_linear").get<double>();
    g.cost_noload = j.at("cost_noload").get<double>();
    g.cost_startup = j.at("cost_startup").get<double>();
    g.initial_on = j.at("initial_on").get<bool>();
    return g;
}

}  // namespace

std::string scenario_json(const MicrogridConfig& config) {
    nlohmann::ordered_json j;
    j["generators"] = nlohmann::ordered_json::array();
    for (const auto& g : config.generators) j["generators"].push_back(gen_to_json(g));
    j["bess"] = {{"e_max", config.bess.e_max},     {"e_min", config.bess.e_min},
                 {"p_max", config.bess.p_max},     {"p_min", config.bess.p_min},
                 {"eff_char", config.bess.eff_char}, {"eff_disc", config.bess.eff_disc},
                 {"e_initial", config.bess.e_initial}, {"soh", config.bess.soh}};
    j["tie_max"] = config.tie_max;
    j["reserve_frac"] = config.reserve_frac;
    j["dt"] = config.dt;
    j["sell_factor"] = config.profiles.sell_factor;
    j["profiles"] = {{"load", config.profiles.load},
                     {"wind", config.profiles.wind},
                     {"pv", config.profiles.pv},
                     {"buy_price", config.profiles.buy_price},
                     {"temp", config.profiles.temp}};
    return j.dump(2) + "\n";
}

MicrogridConfig scenario_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    MicrogridConfig c;
    c.generators.clear();
    for (const auto& g : j.at("generators")) c.generators.push_back(gen_from_json(g));
    const auto& b = j.at("bess");
    c.bess.e_max = b.at("e_max").get<double>();
    c.bess.e_min = b.at("e_min").get<double>();
    c.bess.p_max = b.at("p_max").get<double>();
    c.bess.p_min = b.at("p_min").get<double>();
    c.bess.eff_char = b.at("eff_char").get<double>();
    c.bess.eff_disc = b.at("eff_disc").get<double>();
    c.bess.e_initial = b.at("e_initial").get<double>();
    c.bess.soh = b.at("soh").get<double>();
    c.tie_max = j.at("tie_max").get<double>();
    c.reserve_frac = j.at("reserve_frac").get<double>();
    c.dt = j.at("dt").get<double>();
    c.profiles.sell_factor = j.at("sell_factor").get<double>();
    const auto& p = j.at("profiles");
    c.profiles.load = p.at("load").get<std::vector<double>>();
    c.profiles.wind = p.at("wind").get<std::vector<double>>();
    c.profiles.pv = p.at("pv").get<std::vector<double>>();
    c.profiles.buy_price = p.at("buy_price").get<std::vector<double>>();
    c.profiles.temp = p.at("temp").get<std::vector<double>>();
    c.validate();
    return c;
}

std::string profiles_csv(const Profiles& p) {
    std::string out = "hour,load_kw,wind_kw,pv_kw,buy_price,temp_c\n";
    for (int t = 0; t < p.intervals(); ++t) {
        std::size_t ut = static_cast<std::size_t>(t);
        out += std::to_string(t);
        out += ',';
        io::append_double(out, p.load[ut]);
        out += ',';
        io::append_double(out, p.wind[ut]);
        out += ',';
        io::append_double(out, p.pv[ut]);
        out += ',';
        io::append_double(out, p.buy_price[ut]);
        out += ',';
        io::append_double(out, p.temp[ut]);
        out += '\n';
    }
    return out;
}

Profiles profiles_from_csv(const std::string& text, double sell_factor) {
    io::CsvTable t = io::parse_csv(text);
    int cl = t.column("load_kw"), cw = t.column("wind_kw"), cp = t.column("pv_kw"),
        cb = t.column("buy_price"), ct = t.column("temp_c");
    if (cl < 0 || cw < 0 || cp < 0 || cb < 0 || ct < 0) {
        throw ParameterError("profile CSV missing required columns");
    }
    Profiles p;
    p.sell_factor = sell_factor;
    for (const auto& row : t.rows) {
        p.load.push_back(io::parse_double(row[static_cast<std::size_t>(cl)]));
        p.wind.push_back(io::parse_double(row[static_cast<std::size_t>(cw)]));
        p.pv.push_back(io::parse_double(row[static_cast<std::size_t>(cp)]));
        p.buy_price.push_back(io::parse_double(row[static_cast<std::size_t>(cb)]));
        p.temp.push_back(io::parse_double(row[static_cast<std::size_t>(ct)]));
    }
    p.validate();
    return p;
}

std::string solution_csv(const ScheduleSolution& sol) {
    std::string out = "hour,buy_kw,sell_kw,charge_kw,discharge_kw,energy_kwh,soc";
    for (std::size_t g = 0; g < sol.gen_power.size(); ++g) {
        std::string tag = std::to_string(g);
        out += ",gen" + tag + "_kw,gen" + tag + "_on,gen" + tag + "_start";
    }
    out += '\n';
    for (int t = 0; t < sol.intervals; ++t) {
        std::size_t ut = static_cast<std::size_t>(t);
        out += std::to_string(t);
        for (double v : {sol.buy[ut], sol.sell[ut], sol.charge[ut], sol.discharge[ut],
                         sol.energy[ut], sol.soc[ut]}) {
            out += ',';
            io::append_double(out, v);
        }
        for (std::size_t g = 0; g < sol.gen_power.size(); ++g) {
            out += ',';
            io::append_double(out, sol.gen_power[g][ut]);
            out += ',' + std::to_string(sol.gen_on[g][ut]);
            out += ',' + std::to_string(sol.gen_startup[g][ut]);
        }
        out += '\n';
    }
    return out;
}

std::string solution_summary_json(const ScheduleSolution& sol) {
    nlohmann::ordered_json j;
    j["status"] = sol.status;
    j["operation_cost"] = sol.operation_cost;
    j["gap"] = sol.gap;
    j["intervals"] = sol.intervals;
    return j.dump(2) + "\n";
}

}  // namespace bdms::mds
