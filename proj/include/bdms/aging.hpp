#ifndef BDMS_AGING_HPP
#define BDMS_AGING_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace bdms::aging {

// Ground-truth per-cycle capacity-loss model. A product of stress factors:
// Woehler-type DOD exponent, exponential C-rate and temperature stress,
// linear mean-SOC stress, and SOH-dependent acceleration. All constants are
// serialized alongside every dataset so results stay auditable.
struct OracleParams {
    double k_ref = 2.0e-5;    // capacity-loss fraction per reference cycle
    double dod_exp = 1.6;     // DOD exponent, >= 1
    double c_coeff = 0.3;     // per-unit-C-rate sensitivity
    double t_coeff = 0.035;   // per-degree-Celsius sensitivity
    double t_ref = 25.0;      // reference temperature, degC
    double soc_coeff = 0.5;   // mean-SOC sensitivity
    double soh_coeff = 1.2;   // aging-acceleration coefficient
    double eol_soh = 0.8;     // end-of-test SOH threshold, fraction

    void validate() const;  // throws DomainError
};

struct CycleFeatures {
    double dod;     // fraction of rated capacity swung this cycle
    double c_rate;  // 1/h
    double temp;    // degC
    double soc;     // start-of-cycle SOC fraction
    double soh;     // start-of-cycle SOH fraction
};

struct AgingTestSpec {
    std::string test_id;
    double initial_soc;       // fraction in [0,1]
    double dod;               // fraction in (0,1]
    double c_rate;            // 1/h, > 0
    double ambient_temp;      // degC
    std::uint64_t noise_seed;

    void validate() const;  // throws DomainError; requires initial_soc - dod >= 0
};

struct CycleRecord {
    std::string test_id;
    std::int64_t cycle_index;  // 1-based
    double temp;
    double c_rate;
    double soc;
    double dod;
    double soh;         // start-of-cycle SOH
    double delta_soh;   // true absolute SOH loss this cycle
    double target_rel;  // delta_soh / soh, the network label
};

// Per-cycle series are stored as flat arrays (tests can run to hundreds of
// thousands of cycles); cycle(i) materializes the i-th record.
struct AgingTestResult {
    AgingTestSpec spec;
    std::vector<double> soh;         // start-of-cycle SOH, one per cycle
    std::vector<double> delta_true;  // noiseless per-cycle loss
    std::vector<double> raw_delta;   // noisy per-cycle loss

    std::size_t cycle_count() const { return soh.size(); }
    CycleRecord cycle(std::size_t i) const;
};

double oracle_cycle_loss(const CycleFeatures& f, const OracleParams& params);

AgingTestResult run_aging_test(const AgingTestSpec& spec, const OracleParams& params,
                               std::int64_t cycle_cap = 1'000'000);

// Table of feasible (initial_soc, dod) aging-test cells: every combination of
// the standard SOC and DOD grids with initial_soc - dod >= 0 (29 cells).
struct TestCell {
    double initial_soc;
    double dod;
};
const std::vector<TestCell>& feasible_cells();

// One spec per feasible cell crossed with each (temp, c_rate); per-test noise
// seeds are derived deterministically from the master seed.
std::vector<AgingTestSpec> generate_test_matrix(const std::vector<double>& temps,
                                                const std::vector<double>& c_rates,
                                                std::uint64_t seed);

// Full-scale replication: emits per feasible cell the published number of
// tests (945 total), with temperature and C-rate drawn from the given lists.
std::vector<AgingTestSpec> generate_full_matrix(const std::vector<double>& temps,
                                                const std::vector<double>& c_rates,
                                                std::uint64_t seed);

// Dataset export: CSV with columns test_id, cycle_index, temp_c, c_rate, soc,
// dod, soh, delta_soh_raw, delta_soh_true; sidecar JSON with OracleParams and
// the master seed.
std::string aging_csv(const std::vector<AgingTestResult>& results);
std::string params_json(const OracleParams& params, std::uint64_t master_seed);
OracleParams params_from_json(const std::string& text);

void write_dataset(const std::vector<AgingTestResult>& results, const OracleParams& params,
                   std::uint64_t master_seed, const std::filesystem::path& csv_path,
                   const std::filesystem::path& json_path);

// Deterministic seed derivation (splitmix64 step over the master seed).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace bdms::aging

#endif
