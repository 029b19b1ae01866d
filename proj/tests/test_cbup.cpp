#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>

#include "bdms/cbup.hpp"
#include "bdms/errors.hpp"

using namespace bdms;
using namespace bdms::cbup;

namespace {

mds::MicrogridConfig make_config(int intervals, double e_initial_frac = 0.5) {
    mds::MicrogridConfig c;
    c.generators.clear();
    c.bess.e_initial = e_initial_frac * c.bess.e_max;
    c.profiles.load.assign(static_cast<std::size_t>(intervals), 0.0);
    c.profiles.wind.assign(static_cast<std::size_t>(intervals), 0.0);
    c.profiles.pv.assign(static_cast<std::size_t>(intervals), 0.0);
    c.profiles.buy_price.assign(static_cast<std::size_t>(intervals), 0.1);
    c.profiles.temp.assign(static_cast<std::size_t>(intervals), 25.0);
    return c;
}

// Builds a consistent solution from battery powers via the energy recursion.
mds::ScheduleSolution make_solution(const mds::MicrogridConfig& c,
                                    const std::vector<double>& charge,
                                    const std::vector<double>& discharge) {
    mds::ScheduleSolution s;
    s.intervals = static_cast<int>(charge.size());
    s.charge = charge;
    s.discharge = discharge;
    s.buy.assign(charge.size(), 0.0);
    s.sell.assign(charge.size(), 0.0);
    double e = c.bess.e_initial;
    for (std::size_t t = 0; t < charge.size(); ++t) {
        e += c.dt * (c.bess.eff_char * charge[t] - discharge[t] / c.bess.eff_disc);
        s.energy.push_back(e);
        s.soc.push_back(e / c.bess.e_max);
    }
    return s;
}

}  // namespace

TEST_CASE("all-idle schedule yields no cycles") {
    mds::MicrogridConfig c = make_config(5);
    auto s = make_solution(c, {0, 0, 0, 0, 0}, {0, 0, 0, 0, 0});
    CHECK(aggregate_cycles(s, c).empty());
    CHECK(per_interval_features(s, c).empty());
}

TEST_CASE("two-interval discharge run, hand-checked") {
    mds::MicrogridConfig c = make_config(13, 0.9);  // SOC 0.9 entering the run
    std::vector<double> ch(13, 0.0), di(13, 0.0);
    di[10] = di[11] = 54.0;
    auto s = make_solution(c, ch, di);
    auto cycles = aggregate_cycles(s, c);
    REQUIRE(cycles.size() == 1);
    const auto& cy = cycles[0];
    CHECK(cy.start_t == 10);
    CHECK(cy.end_t == 12);
    CHECK_FALSE(cy.is_charge);
    CHECK(cy.avg_power == doctest::Approx(54.0));
    CHECK(cy.c_rate == doctest::Approx(0.18));
    CHECK(cy.soc_start == doctest::Approx(0.9));
    CHECK(cy.dod == doctest::Approx(0.4).epsilon(1e-9));

    auto rows = per_interval_features(s, c);
    REQUIRE(rows.size() == 2);
    for (const auto& x : rows) {
        CHECK(x(3) == doctest::Approx(0.2).epsilon(1e-9));  // dod
        CHECK(x(1) == doctest::Approx(0.2).epsilon(1e-9));  // c_rate = dod / dt
    }
}

TEST_CASE("direction change and idle both split runs") {
    mds::MicrogridConfig c = make_config(6);
    auto s = make_solution(c, {50, 0, 0, 50, 0, 0}, {0, 50, 0, 0, 0, 50});
    auto cycles = aggregate_cycles(s, c);
    REQUIRE(cycles.size() == 4);
    CHECK(cycles[0].is_charge);
    CHECK_FALSE(cycles[1].is_charge);
    CHECK(cycles[2].start_t == 3);
    CHECK(cycles[2].end_t == 4);
    CHECK(cycles[3].start_t == 5);
}

TEST_CASE("half-hour intervals double the per-interval c-rate") {
    mds::MicrogridConfig c = make_config(2);
    c.dt = 0.5;
    auto s = make_solution(c, {60, 0}, {0, 0});  // dSOC = 60*0.9*0.5/300 = 0.09
    auto rows = per_interval_features(s, c);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0](3) == doctest::Approx(0.09));
    CHECK(rows[0](1) == doctest::Approx(0.18));
}

TEST_CASE("cycle temperature is power-weighted") {
    mds::MicrogridConfig c = make_config(2);
    c.profiles.temp = {20.0, 40.0};
    auto s = make_solution(c, {10, 30}, {0, 0});
    auto cycles = aggregate_cycles(s, c);
    REQUIRE(cycles.size() == 1);
    CHECK(cycles[0].temp == doctest::Approx(35.0));  // (10*20 + 30*40)/40
    CHECK(cycles[0].avg_power == doctest::Approx(20.0));
}

TEST_CASE("total degradation sums scaled predictions") {
    mds::MicrogridConfig c = make_config(4);
    auto s = make_solution(c, {50, 0, 0, 0}, {0, 0, 40, 0});
    auto cycles = aggregate_cycles(s, c);
    REQUIRE(cycles.size() == 2);
    double bd = total_bd(cycles, 0.95, [](const Eigen::Matrix<double, 5, 1>&) { return 2e-5; });
    CHECK(bd == doctest::Approx(2 * 2e-5 * 0.95).epsilon(1e-12));
    CHECK(cycles[0].predicted_bd == doctest::Approx(1.9e-5).epsilon(1e-12));
}

TEST_CASE("partition and power-conservation properties on random schedules") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> mode(0, 2);
    std::uniform_real_distribution<double> pw(5.0, 80.0);
    for (int trial = 0; trial < 20; ++trial) {
        mds::MicrogridConfig c = make_config(24);
        std::vector<double> ch(24, 0.0), di(24, 0.0);
        for (int t = 0; t < 24; ++t) {
            int m = mode(rng);
            if (m == 1) ch[static_cast<std::size_t>(t)] = pw(rng);
            if (m == 2) di[static_cast<std::size_t>(t)] = pw(rng);
        }
        auto s = make_solution(c, ch, di);
        auto cycles = aggregate_cycles(s, c);
        std::vector<int> owner(24, 0);
        for (const auto& cy : cycles) {
            double sum = 0;
            for (int t = cy.start_t; t < cy.end_t; ++t) {
                owner[static_cast<std::size_t>(t)]++;
                sum += cy.is_charge ? ch[static_cast<std::size_t>(t)]
                                    : di[static_cast<std::size_t>(t)];
            }
            CHECK(cy.avg_power * (cy.end_t - cy.start_t) == doctest::Approx(sum).epsilon(1e-9));
        }
        for (int t = 0; t < 24; ++t) {
            bool active = ch[static_cast<std::size_t>(t)] > 1e-6 ||
                          di[static_cast<std::size_t>(t)] > 1e-6;
            CHECK(owner[static_cast<std::size_t>(t)] == (active ? 1 : 0));
        }
    }
}

TEST_CASE("degradation cost formula and linearity") {
    DegradationCostParams p;  // 120000 / 0.3 slope
    CHECK(degradation_cost(p, 0.0) == 0.0);
    CHECK(degradation_cost(p, 4.5e-5) == doctest::Approx(18.0).epsilon(1e-12));
    CHECK(degradation_cost(p, 9.0e-5) == doctest::Approx(2 * 18.0).epsilon(1e-12));
    DegradationCostParams flat;
    flat.capital = flat.salvage = 50000.0;
    CHECK(degradation_cost(flat, 0.01) == 0.0);
    DegradationCostParams bad;
    bad.soh_eol = 1.0;
    CHECK_THROWS_AS(degradation_cost(bad, 0.01), ParameterError);
}

TEST_CASE("expected lifetime arithmetic") {
    CHECK(expected_lifetime(0.0002, 1.0, 0.7) == doctest::Approx(4.1).epsilon(0.01));
    CHECK(expected_lifetime(0.000045, 1.0, 0.7) == doctest::Approx(18.3).epsilon(0.01));
    CHECK(expected_lifetime(0.3 / 365.0, 1.0, 0.7) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(expected_lifetime(0.0, 1.0, 0.7), ParameterError);
}

TEST_CASE("untrained model is rejected") {
    mds::MicrogridConfig c = make_config(2);
    auto s = make_solution(c, {50, 0}, {0, 0});
    auto cycles = aggregate_cycles(s, c);
    nnbd::DegradationModel m = nnbd::init_network(nnbd::NetworkSpec{}, 1);
    CHECK_THROWS_AS(estimate_degradation(m, cycles, 1.0), StateError);
    CHECK_THROWS_AS(estimate_degradation_per_interval(m, s, c), StateError);
}

TEST_CASE("cycle CSV has one row per cycle") {
    mds::MicrogridConfig c = make_config(3);
    auto s = make_solution(c, {50, 0, 0}, {0, 0, 40});
    auto cycles = aggregate_cycles(s, c);
    std::string csv = cycles_csv(cycles);
    CHECK(csv.find("predicted_bd") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
