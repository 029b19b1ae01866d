#include "bdms/dataprep.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "bdms/errors.hpp"
#include "bdms/io_util.hpp"
#include "json.hpp"

namespace bdms::dataprep {

const char* mode_name(Mode m) {
    switch (m) {
        case Mode::raw: return "raw";
        case Mode::smoothed: return "smoothed";
        case Mode::regressed: return "regressed";
    }
    return "?";
}

Mode mode_from_name(const std::string& name) {
    if (name == "raw") return Mode::raw;
    if (name == "smoothed") return Mode::smoothed;
    if (name == "regressed") return Mode::regressed;
    throw ParameterError("unknown pre-processing mode: " + name);
}

namespace {

double median_of(std::vector<double>& scratch) {
    std::size_t n = scratch.size();
    auto mid = scratch.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(scratch.begin(), mid, scratch.end());
    if (n % 2 == 1) return *mid;
    double hi = *mid;
    double lo = *std::max_element(scratch.begin(), mid);
    return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> smooth_series(const std::vector<double>& series, int window, double mad_k) {
    if (window < 1 || window % 2 == 0) throw ParameterError("window must be odd and >= 1");
    if (series.empty()) throw ParameterError("series must be non-empty");
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(series.size());
    const std::ptrdiff_t half = window / 2;

    // Hampel step: points deviating from the window median by more than
    // mad_k * 1.4826 * MAD are replaced by that median.
    std::vector<double> filtered(series);
    if (half > 0) {
        std::vector<double> scratch, dev;
        scratch.reserve(window);
        dev.reserve(window);
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
            std::ptrdiff_t hi = std::min(n - 1, i + half);
            scratch.assign(series.begin() + lo, series.begin() + hi + 1);
            double med = median_of(scratch);
            dev.clear();
            for (std::ptrdiff_t j = lo; j <= hi; ++j) dev.push_back(std::abs(series[j] - med));
            double mad = median_of(dev);
            if (std::abs(series[i] - med) > mad_k * 1.4826 * mad) filtered[i] = med;
        }
    }

    // Centered moving average with truncated edge windows; maintained as a
    // running sum so the pass is O(n).
    std::vector<double> out(series.size());
    if (half == 0) return filtered;
    double acc = 0.0;
    std::ptrdiff_t lo = 0, hi = -1;  // current [lo, hi] window
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        std::ptrdiff_t want_lo = std::max<std::ptrdiff_t>(0, i - half);
        std::ptrdiff_t want_hi = std::min(n - 1, i + half);
        while (hi < want_hi) acc += filtered[static_cast<std::size_t>(++hi)];
        while (lo < want_lo) acc -= filtered[static_cast<std::size_t>(lo++)];
        out[static_cast<std::size_t>(i)] = acc / static_cast<double>(want_hi - want_lo + 1);
    }
    return out;
}

std::vector<double> regress_series(const std::vector<double>& series) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(series.size());
    if (n < 2) throw ParameterError("regress_series needs length >= 2");
    // OLS over the 1-based cycle index.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double x = static_cast<double>(i + 1);
        double y = series[static_cast<std::size_t>(i)];
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double denom = static_cast<double>(n) * sxx - sx * sx;
    double slope = (static_cast<double>(n) * sxy - sx * sy) / denom;
    double intercept = (sy - slope * sx) / static_cast<double>(n);
    std::vector<double> out(series.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = std::max(0.0, intercept + slope * static_cast<double>(i + 1));
    }
    return out;
}

namespace {

const char* kFeatureNames[5] = {"temp", "c_rate", "soc", "dod", "soh"};

}  // namespace

void apply_standardization(Dataset& ds, const NormStats& stats) {
    for (int k = 0; k < 5; ++k) {
        ds.features.row(k) =
            (ds.features.row(k).array() - stats.feature_mean(k)) / std::sqrt(stats.feature_var(k));
    }
    ds.target = (ds.target.array() - stats.target_mean) / std::sqrt(stats.target_var);
}

NormStats standardize(Dataset& train, const std::vector<Dataset*>& others) {
    if (train.rows() == 0) throw ParameterError("training dataset is empty");
    NormStats stats;
    const double n = static_cast<double>(train.rows());
    for (int k = 0; k < 5; ++k) {
        double mean = train.features.row(k).mean();
        double var = (train.features.row(k).array() - mean).square().sum() / n;
        if (var <= kVarianceFloor) {
            throw ParameterError(std::string("degenerate feature: ") + kFeatureNames[k]);
        }
        stats.feature_mean(k) = mean;
        stats.feature_var(k) = var;
    }
    stats.target_mean = train.target.mean();
    stats.target_var = (train.target.array() - stats.target_mean).square().sum() / n;
    if (stats.target_var <= kVarianceFloor) throw ParameterError("degenerate feature: target");

    apply_standardization(train, stats);
    for (Dataset* ds : others) apply_standardization(*ds, stats);
    return stats;
}

std::pair<Dataset, Dataset> split_by_test(const Dataset& ds, double ratio, std::uint64_t seed) {
    if (!(ratio > 0 && ratio < 1)) throw ParameterError("ratio must be in (0,1)");
    const std::size_t g = ds.groups();
    if (g < 2) throw ParameterError("need at least 2 test groups to split");

    std::vector<std::size_t> order(g);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    std::size_t n_train = static_cast<std::size_t>(std::llround(static_cast<double>(g) * ratio));
    n_train = std::clamp<std::size_t>(n_train, 1, g - 1);

    std::vector<bool> in_train(g, false);
    for (std::size_t i = 0; i < n_train; ++i) in_train[order[i]] = true;

    auto extract = [&](bool train_side) {
        Dataset out;
        out.mode = ds.mode;
        std::ptrdiff_t total = 0;
        for (std::size_t i = 0; i < g; ++i) {
            if (in_train[i] == train_side) total += ds.group_offsets[i + 1] - ds.group_offsets[i];
        }
        out.features.resize(5, total);
        out.target.resize(total);
        out.group_offsets.push_back(0);
        std::ptrdiff_t at = 0;
        for (std::size_t i = 0; i < g; ++i) {
            if (in_train[i] != train_side) continue;
            std::ptrdiff_t lo = ds.group_offsets[i];
            std::ptrdiff_t len = ds.group_offsets[i + 1] - lo;
            out.features.middleCols(at, len) = ds.features.middleCols(lo, len);
            out.target.segment(at, len) = ds.target.segment(lo, len);
            at += len;
            out.test_ids.push_back(ds.test_ids[i]);
            out.group_offsets.push_back(at);
        }
        return out;
    };
    return {extract(true), extract(false)};
}

std::vector<PreservationRow> cumulative_preservation_report(
    const std::vector<double>& raw, const std::vector<double>& processed,
    const std::vector<std::ptrdiff_t>& checkpoints) {
    if (raw.size() != processed.size()) throw ParameterError("series length mismatch");
    std::vector<PreservationRow> out;
    for (std::ptrdiff_t cp : checkpoints) {
        std::ptrdiff_t n = std::min<std::ptrdiff_t>(cp, static_cast<std::ptrdiff_t>(raw.size()));
        double sr = std::accumulate(raw.begin(), raw.begin() + n, 0.0);
        double sp = std::accumulate(processed.begin(), processed.begin() + n, 0.0);
        out.push_back({cp, sr == 0.0 ? 0.0 : std::abs(sp - sr) / sr});
    }
    return out;
}

Dataset build_dataset(const std::vector<aging::AgingTestResult>& results, Mode mode, int window,
                      double mad_k) {
    Dataset ds;
    ds.mode = mode;
    std::ptrdiff_t total = 0;
    for (const auto& r : results) total += static_cast<std::ptrdiff_t>(r.cycle_count());
    ds.features.resize(5, total);
    ds.target.resize(total);
    ds.group_offsets.push_back(0);

    std::ptrdiff_t at = 0;
    for (const auto& r : results) {
        const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(r.cycle_count());
        std::vector<double> series = r.raw_delta;
        if (mode == Mode::smoothed || mode == Mode::regressed) {
            series = smooth_series(series, window, mad_k);
        }
        if (mode == Mode::regressed && n >= 2) series = regress_series(series);
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            auto col = ds.features.col(at + i);
            col(0) = r.spec.ambient_temp;
            col(1) = r.spec.c_rate;
            col(2) = r.spec.initial_soc;
            col(3) = r.spec.dod;
            col(4) = r.soh[static_cast<std::size_t>(i)];
            ds.target(at + i) = series[static_cast<std::size_t>(i)] / r.soh[static_cast<std::size_t>(i)];
        }
        at += n;
        ds.test_ids.push_back(r.spec.test_id);
        ds.group_offsets.push_back(at);
    }
    return ds;
}

std::vector<aging::AgingTestResult> load_results_csv(const std::filesystem::path& path) {
    std::string text = io::read_file(path);
    io::CsvTable table = io::parse_csv(text);
    int id = table.column("test_id");
    int temp = table.column("temp_c");
    int cr = table.column("c_rate");
    int soc = table.column("soc");
    int dod = table.column("dod");
    int soh = table.column("soh");
    int raw = table.column("delta_soh_raw");
    int tru = table.column("delta_soh_true");
    if (id < 0 || temp < 0 || cr < 0 || soc < 0 || dod < 0 || soh < 0 || raw < 0 || tru < 0) {
        throw ParameterError("aging CSV missing required columns: " + path.string());
    }
    std::vector<aging::AgingTestResult> out;
    for (const auto& row : table.rows) {
        if (out.empty() || out.back().spec.test_id != row[static_cast<std::size_t>(id)]) {
            aging::AgingTestResult r;
            r.spec.test_id = row[static_cast<std::size_t>(id)];
            r.spec.ambient_temp = io::parse_double(row[static_cast<std::size_t>(temp)]);
            r.spec.c_rate = io::parse_double(row[static_cast<std::size_t>(cr)]);
            r.spec.initial_soc = io::parse_double(row[static_cast<std::size_t>(soc)]);
            r.spec.dod = io::parse_double(row[static_cast<std::size_t>(dod)]);
            r.spec.noise_seed = 0;
            out.push_back(std::move(r));
        }
        auto& r = out.back();
        r.soh.push_back(io::parse_double(row[static_cast<std::size_t>(soh)]));
        r.delta_true.push_back(io::parse_double(row[static_cast<std::size_t>(tru)]));
        r.raw_delta.push_back(io::parse_double(row[static_cast<std::size_t>(raw)]));
    }
    return out;
}

std::string dataset_csv(const Dataset& ds) {
    std::string out = "test_id,temp_c,c_rate,soc,dod,soh,target_rel\n";
    out.reserve(static_cast<std::size_t>(ds.rows()) * 64 + 64);
    for (std::size_t g = 0; g < ds.groups(); ++g) {
        for (std::ptrdiff_t i = ds.group_offsets[g]; i < ds.group_offsets[g + 1]; ++i) {
            out += ds.test_ids[g];
            for (int k = 0; k < 5; ++k) {
                out += ',';
                io::append_double(out, ds.features(k, i));
            }
            out += ',';
            io::append_double(out, ds.target(i));
            out += '\n';
        }
    }
    return out;
}

Dataset dataset_from_csv(const std::string& text, Mode mode) {
    io::CsvTable table = io::parse_csv(text);
    int id = table.column("test_id");
    int cols[5] = {table.column("temp_c"), table.column("c_rate"), table.column("soc"),
                   table.column("dod"), table.column("soh")};
    int tgt = table.column("target_rel");
    if (id < 0 || tgt < 0 || std::any_of(cols, cols + 5, [](int c) { return c < 0; })) {
        throw ParameterError("dataset CSV missing required columns");
    }
    Dataset ds;
    ds.mode = mode;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(table.rows.size());
    ds.features.resize(5, n);
    ds.target.resize(n);
    ds.group_offsets.push_back(0);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto& row = table.rows[static_cast<std::size_t>(i)];
        if (ds.test_ids.empty() || ds.test_ids.back() != row[static_cast<std::size_t>(id)]) {
            if (!ds.test_ids.empty()) ds.group_offsets.push_back(i);
            ds.test_ids.push_back(row[static_cast<std::size_t>(id)]);
        }
        for (int k = 0; k < 5; ++k) {
            ds.features(k, i) = io::parse_double(row[static_cast<std::size_t>(cols[k])]);
        }
        ds.target(i) = io::parse_double(row[static_cast<std::size_t>(tgt)]);
    }
    ds.group_offsets.push_back(n);
    return ds;
}

std::string norm_stats_json(const NormStats& stats) {
    nlohmann::ordered_json j;
    j["feature_means"] = std::vector<double>(stats.feature_mean.data(), stats.feature_mean.data() + 5);
    j["feature_vars"] = std::vector<double>(stats.feature_var.data(), stats.feature_var.data() + 5);
    j["target_mean"] = stats.target_mean;
    j["target_var"] = stats.target_var;
    return j.dump(2) + "\n";
}

NormStats norm_stats_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    NormStats s;
    auto means = j.at("feature_means").get<std::vector<double>>();
    auto vars = j.at("feature_vars").get<std::vector<double>>();
    if (means.size() != 5 || vars.size() != 5) throw ParameterError("norm stats must have 5 features");
    for (int k = 0; k < 5; ++k) {
        s.feature_mean(k) = means[static_cast<std::size_t>(k)];
        s.feature_var(k) = vars[static_cast<std::size_t>(k)];
    }
    s.target_mean = j.at("target_mean").get<double>();
    s.target_var = j.at("target_var").get<double>();
    return s;
}

}  // namespace bdms::dataprep
