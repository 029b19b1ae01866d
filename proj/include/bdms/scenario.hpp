#ifndef BDMS_SCENARIO_HPP
#define BDMS_SCENARIO_HPP

#include <cstdint>

#include "bdms/mds.hpp"

namespace bdms::scenario {

struct ScenarioOptions {
    std::uint64_t seed = 0;
    double penetration = 0.8;  // mean(wind + pv) / mean(load)
    int intervals = 24;
    double bess_e_max = 300.0;     // kWh
    double bess_unit_price = 400;  // $/kWh, feeds the degradation cost slope

    void validate() const;
};

// Synthetic single-generator testbed: seeded sinusoid-plus-noise profiles for
// load, prices, wind, solar, and temperature, with renewables scaled to the
// requested penetration.
mds::MicrogridConfig make_scenario(const ScenarioOptions& options);

}  // namespace bdms::scenario

#endif
