#include "bdms/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "bdms/errors.hpp"

namespace bdms::scenario {

namespace {
constexpr double kTau = 6.283185307179586;
}

void ScenarioOptions::validate() const {
    if (!(penetration >= 0 && penetration <= 2)) {
        throw ParameterError("penetration must be in [0,2]");
    }
    if (intervals < 2 || intervals > 96) throw ParameterError("intervals must be in [2,96]");
    if (!(bess_e_max > 0)) throw ParameterError("bess_e_max must be > 0");
    if (!(bess_unit_price >= 0)) throw ParameterError("bess_unit_price must be >= 0");
}

mds::MicrogridConfig make_scenario(const ScenarioOptions& options) {
    options.validate();
    const int T = options.intervals;
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    mds::MicrogridConfig cfg;
    cfg.generators = {mds::GeneratorSpec{}};
    cfg.bess.e_max = options.bess_e_max;
    cfg.bess.e_min = 0.10 * options.bess_e_max;
    cfg.bess.e_initial = 0.50 * options.bess_e_max;
    cfg.bess.p_max = 0.5 * options.bess_e_max;

    auto& p = cfg.profiles;
    p.load.resize(static_cast<std::size_t>(T));
    p.wind.resize(static_cast<std::size_t>(T));
    p.pv.resize(static_cast<std::size_t>(T));
    p.buy_price.resize(static_cast<std::size_t>(T));
    p.temp.resize(static_cast<std::size_t>(T));

    for (int t = 0; t < T; ++t) {
        std::size_t ut = static_cast<std::size_t>(t);
        double hour = static_cast<double>(t) * 24.0 / T;
        // Evening-peaking residential load.
        p.load[ut] = std::max(
            20.0, 180.0 + 70.0 * std::sin(kTau * (hour - 11.0) / 24.0) + 6.0 * gauss(rng));
        // Cheap overnight energy, a shallow morning ripple that is barely
        // worth an extra battery cycle, and a broad expensive evening block,
        // so restricting battery throughput has a graded operation-cost price.
        double evening = std::max(0.0, std::sin(kTau * (hour - 10.0) / 24.0));
        double morning = std::max(0.0, std::sin(kTau * (hour - 2.0) / 12.0));
        p.buy_price[ut] = std::max(0.01, 0.07 + 0.33 * evening * evening +
                                             0.035 * morning * morning + 0.004 * gauss(rng));
        p.temp[ut] = 22.0 + 8.0 * std::sin(kTau * (hour - 9.0) / 24.0) + 0.5 * gauss(rng);
        // Midday solar bell; mild diurnal wind.
        p.pv[ut] = hour >= 6 && hour <= 18
                       ? std::max(0.0, std::sin(kTau * (hour - 6.0) / 24.0) + 0.05 * gauss(rng))
                       : 0.0;
        p.wind[ut] = std::max(0.0, 0.8 + 0.4 * std::sin(kTau * (hour + 3.0) / 24.0) +
                                       0.15 * gauss(rng));
    }

    double mean_load = std::accumulate(p.load.begin(), p.load.end(), 0.0) / T;
    double mean_res =
        (std::accumulate(p.wind.begin(), p.wind.end(), 0.0) +
         std::accumulate(p.pv.begin(), p.pv.end(), 0.0)) /
        T;
    double scale = mean_res > 0 ? options.penetration * mean_load / mean_res : 0.0;
    for (int t = 0; t < T; ++t) {
        std::size_t ut = static_cast<std::size_t>(t);
        p.wind[ut] *= scale;
        p.pv[ut] *= scale;
    }
    cfg.validate();
    return cfg;
}

}  // namespace bdms::scenario
