#include "bdms/aging.hpp"

#include <cmath>
#include <random>

#include "bdms/errors.hpp"
#include "bdms/io_util.hpp"
#include "json.hpp"

namespace bdms::aging {

namespace {

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw DomainError(std::string(name) + " must be finite");
}

}  // namespace

void OracleParams::validate() const {
    require_finite(k_ref, "k_ref");
    require_finite(dod_exp, "dod_exp");
    require_finite(c_coeff, "c_coeff");
    require_finite(t_coeff, "t_coeff");
    require_finite(t_ref, "t_ref");
    require_finite(soc_coeff, "soc_coeff");
    require_finite(soh_coeff, "soh_coeff");
    if (k_ref <= 0) throw DomainError("k_ref must be > 0");
    if (dod_exp < 1) throw DomainError("dod_exp must be >= 1");
    if (!(eol_soh > 0 && eol_soh < 1)) throw DomainError("eol_soh must be in (0,1)");
}

void AgingTestSpec::validate() const {
    require_finite(initial_soc, "initial_soc");
    require_finite(dod, "dod");
    require_finite(c_rate, "c_rate");
    require_finite(ambient_temp, "ambient_temp");
    if (initial_soc < 0 || initial_soc > 1) throw DomainError("initial_soc must be in [0,1]");
    if (!(dod > 0 && dod <= 1)) throw DomainError("dod must be in (0,1]");
    if (c_rate <= 0) throw DomainError("c_rate must be > 0");
    if (initial_soc - dod < 0) throw DomainError("initial_soc - dod must be >= 0");
}

CycleRecord AgingTestResult::cycle(std::size_t i) const {
    CycleRecord r;
    r.test_id = spec.test_id;
    r.cycle_index = static_cast<std::int64_t>(i) + 1;
    r.temp = spec.ambient_temp;
    r.c_rate = spec.c_rate;
    r.soc = spec.initial_soc;
    r.dod = spec.dod;
    r.soh = soh[i];
    r.delta_soh = delta_true[i];
    r.target_rel = delta_true[i] / soh[i];
    return r;
}

double oracle_cycle_loss(const CycleFeatures& f, const OracleParams& params) {
    params.validate();
    require_finite(f.temp, "temp");
    require_finite(f.soc, "soc");
    if (!std::isfinite(f.dod) || f.dod < 0 || f.dod > 1) {
        throw DomainError("dod out of range [0,1]");
    }
    if (!std::isfinite(f.c_rate) || f.c_rate <= 0) {
        throw DomainError("c_rate must be > 0");
    }
    if (!std::isfinite(f.soh) || f.soh <= params.eol_soh - 0.05 || f.soh > 1) {
        throw DomainError("soh out of range (eol_soh - 0.05, 1]");
    }
    double loss = params.k_ref * std::pow(f.dod, params.dod_exp) *
                  std::exp(params.c_coeff * (f.c_rate - 0.5)) *
                  std::exp(params.t_coeff * (f.temp - params.t_ref)) *
                  (1.0 + params.soc_coeff * (f.soc - 0.5)) *
                  (1.0 + params.soh_coeff * (1.0 - f.soh));
    if (!std::isfinite(loss) || loss < 0) throw DomainError("oracle loss not finite/non-negative");
    return loss;
}

AgingTestResult run_aging_test(const AgingTestSpec& spec, const OracleParams& params,
                               std::int64_t cycle_cap) {
    spec.validate();
    params.validate();

    AgingTestResult result;
    result.spec = spec;

    std::mt19937_64 rng(spec.noise_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    double soh = 1.0;
    std::int64_t n = 0;
    while (soh > params.eol_soh) {
        if (++n > cycle_cap) {
            throw DivergenceError("aging test " + spec.test_id + " did not reach eol_soh within " +
                                  std::to_string(cycle_cap) + " cycles");
        }
        CycleFeatures f{spec.dod, spec.c_rate, spec.ambient_temp, spec.initial_soc, soh};
        double loss = oracle_cycle_loss(f, params);
        // Occasional outlier: residual amplified 5x, zero-mean so smoothing can
        // remove the spikes without biasing the cumulative degradation.
        double sigma = (uni(rng) < 0.01) ? 0.5 : 0.1;
        double noisy = std::max(0.0, loss * (1.0 + sigma * gauss(rng)));
        result.soh.push_back(soh);
        result.delta_true.push_back(loss);
        result.raw_delta.push_back(noisy);
        soh -= loss;
    }
    return result;
}

namespace {

// Table grids: initial SOC columns and DOD rows; a cell is feasible when a
// cycle can discharge from initial_soc by dod without going below zero.
const double kSocLevels[] = {1.0, 0.8, 0.6, 0.5, 0.4, 0.2};
const double kDodLevels[] = {0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};

// Published per-cell test counts, indexed [dod][soc] in the grid order above.
const int kFullCellCounts[9][6] = {
    {4, 5, 17, 23, 22, 23}, {20, 34, 36, 32, 37, 0}, {36, 41, 41, 40, 44, 0},
    {38, 41, 36, 42, 0, 0}, {37, 37, 37, 0, 0, 0},   {41, 36, 0, 0, 0, 0},
    {39, 35, 0, 0, 0, 0},   {35, 0, 0, 0, 0, 0},     {36, 0, 0, 0, 0, 0}};

std::string cell_id(double soc, double dod, double temp, double c_rate, int replicate = -1) {
    auto pct = [](double v) { return std::to_string(static_cast<int>(std::lround(v * 100))); };
    std::string id = "soc" + pct(soc) + "_dod" + pct(dod) + "_t" +
                     std::to_string(static_cast<int>(std::lround(temp))) + "_c" + pct(c_rate);
    if (replicate >= 0) id += "_r" + std::to_string(replicate);
    return id;
}

}  // namespace

const std::vector<TestCell>& feasible_cells() {
    static const std::vector<TestCell> cells = [] {
        std::vector<TestCell> out;
        for (double dod : kDodLevels) {
            for (double soc : kSocLevels) {
                if (soc - dod >= -1e-12) out.push_back({soc, dod});
            }
        }
        return out;
    }();
    return cells;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    // splitmix64 over master + index
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<AgingTestSpec> generate_test_matrix(const std::vector<double>& temps,
                                                const std::vector<double>& c_rates,
                                                std::uint64_t seed) {
    if (temps.empty() || c_rates.empty()) throw ParameterError("temps and c_rates must be non-empty");
    for (double c : c_rates) {
        if (c <= 0) throw ParameterError("c_rates must be positive");
    }
    std::vector<AgingTestSpec> specs;
    std::uint64_t index = 0;
    for (const TestCell& cell : feasible_cells()) {
        for (double temp : temps) {
            for (double c : c_rates) {
                AgingTestSpec s;
                s.test_id = cell_id(cell.initial_soc, cell.dod, temp, c);
                s.initial_soc = cell.initial_soc;
                s.dod = cell.dod;
                s.c_rate = c;
                s.ambient_temp = temp;
                s.noise_seed = derive_seed(seed, index++);
                s.validate();
                specs.push_back(std::move(s));
            }
        }
    }
    return specs;
}

std::vector<AgingTestSpec> generate_full_matrix(const std::vector<double>& temps,
                                                const std::vector<double>& c_rates,
                                                std::uint64_t seed) {
    if (temps.empty() || c_rates.empty()) throw ParameterError("temps and c_rates must be non-empty");
    std::vector<AgingTestSpec> specs;
    std::uint64_t index = 0;
    for (int di = 0; di < 9; ++di) {
        for (int si = 0; si < 6; ++si) {
            int count = kFullCellCounts[di][si];
            for (int r = 0; r < count; ++r) {
                std::uint64_t s0 = derive_seed(seed, index);
                AgingTestSpec s;
                s.initial_soc = kSocLevels[si];
                s.dod = kDodLevels[di];
                s.ambient_temp = temps[s0 % temps.size()];
                s.c_rate = c_rates[(s0 >> 16) % c_rates.size()];
                s.test_id = cell_id(s.initial_soc, s.dod, s.ambient_temp, s.c_rate, r);
                s.noise_seed = derive_seed(seed, index + 1'000'000);
                ++index;
                s.validate();
                specs.push_back(std::move(s));
            }
        }
    }
    return specs;
}

std::string aging_csv(const std::vector<AgingTestResult>& results) {
    std::string out;
    std::size_t total = 0;
    for (const auto& r : results) total += r.cycle_count();
    out.reserve(total * 80 + 128);
    out += "test_id,cycle_index,temp_c,c_rate,soc,dod,soh,delta_soh_raw,delta_soh_true\n";
    for (const auto& r : results) {
        std::string prefix = r.spec.test_id + ",";
        std::string mid;
        mid.reserve(64);
        mid.clear();
        io::append_double(mid, r.spec.ambient_temp);
        mid += ',';
        io::append_double(mid, r.spec.c_rate);
        mid += ',';
        io::append_double(mid, r.spec.initial_soc);
        mid += ',';
        io::append_double(mid, r.spec.dod);
        mid += ',';
        for (std::size_t i = 0; i < r.cycle_count(); ++i) {
            out += prefix;
            out += std::to_string(i + 1);
            out += ',';
            out += mid;
            io::append_double(out, r.soh[i]);
            out += ',';
            io::append_double(out, r.raw_delta[i]);
            out += ',';
            io::append_double(out, r.delta_true[i]);
            out += '\n';
        }
    }
    return out;
}

std::string params_json(const OracleParams& p, std::uint64_t master_seed) {
    nlohmann::ordered_json j;
    j["k_ref"] = p.k_ref;
    j["dod_exp"] = p.dod_exp;
    j["c_coeff"] = p.c_coeff;
    j["t_coeff"] = p.t_coeff;
    j["t_ref"] = p.t_ref;
    j["soc_coeff"] = p.soc_coeff;
    j["soh_coeff"] = p.soh_coeff;
    j["eol_soh"] = p.eol_soh;
    j["master_seed"] = master_seed;
    return j.dump(2) + "\n";
}

OracleParams params_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    OracleParams p;
    p.k_ref = j.at("k_ref").get<double>();
    p.dod_exp = j.at("dod_exp").get<double>();
    p.c_coeff = j.at("c_coeff").get<double>();
    p.t_coeff = j.at("t_coeff").get<double>();
    p.t_ref = j.at("t_ref").get<double>();
    p.soc_coeff = j.at("soc_coeff").get<double>();
    p.soh_coeff = j.at("soh_coeff").get<double>();
    p.eol_soh = j.at("eol_soh").get<double>();
    p.validate();
    return p;
}

void write_dataset(const std::vector<AgingTestResult>& results, const OracleParams& params,
                   std::uint64_t master_seed, const std::filesystem::path& csv_path,
                   const std::filesystem::path& json_path) {
    io::write_file_atomic(csv_path, aging_csv(results));
    io::write_file_atomic(json_path, params_json(params, master_seed));
}

}  // namespace bdms::aging
