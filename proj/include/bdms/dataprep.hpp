#ifndef BDMS_DATAPREP_HPP
#define BDMS_DATAPREP_HPP

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bdms/aging.hpp"

namespace bdms::dataprep {

enum class Mode { raw, smoothed, regressed };

const char* mode_name(Mode m);
Mode mode_from_name(const std::string& name);

// Feature rows are stored column-wise (one column per cycle record) in the
// order temp, c_rate, soc, dod, soh. Rows keep cycle order within each test
// group; groups are delimited by group_offsets.
struct Dataset {
    Mode mode = Mode::raw;
    Eigen::Matrix<double, 5, Eigen::Dynamic> features;
    Eigen::VectorXd target;
    std::vector<std::string> test_ids;          // one per group
    std::vector<std::ptrdiff_t> group_offsets;  // size groups()+1, offsets into columns

    std::ptrdiff_t rows() const { return features.cols(); }
    std::size_t groups() const { return test_ids.size(); }
};

struct NormStats {
    Eigen::Matrix<double, 5, 1> feature_mean = Eigen::Matrix<double, 5, 1>::Zero();
    Eigen::Matrix<double, 5, 1> feature_var = Eigen::Matrix<double, 5, 1>::Ones();
    double target_mean = 0.0;
    double target_var = 1.0;
};

constexpr double kVarianceFloor = 1e-12;

// Hampel outlier replacement followed by a centered moving average, both with
// the same window; edge windows are truncated.
std::vector<double> smooth_series(const std::vector<double>& series, int window = 21,
                                  double mad_k = 3.0);

// Ordinary least squares over cycle index; negative fitted values clamp to 0.
std::vector<double> regress_series(const std::vector<double>& series);

// Standardizes train in place per (x - mean)/sqrt(var) with population
// statistics from train only, then applies the same statistics to others.
NormStats standardize(Dataset& train, const std::vector<Dataset*>& others = {});

void apply_standardization(Dataset& ds, const NormStats& stats);

// Whole aging tests are held out; assignment is a seeded shuffle of groups,
// train size = round(groups * ratio). Original group order is preserved
// within each split.
std::pair<Dataset, Dataset> split_by_test(const Dataset& ds, double ratio, std::uint64_t seed);

struct PreservationRow {
    std::ptrdiff_t checkpoint;
    double rel_diff;  // |sum processed - sum raw| / sum raw over [0, checkpoint)
};
std::vector<PreservationRow> cumulative_preservation_report(
    const std::vector<double>& raw, const std::vector<double>& processed,
    const std::vector<std::ptrdiff_t>& checkpoints);

// Builds the NN-ready dataset for one pre-processing mode from aging results.
// The target is the per-cycle loss series (raw, smoothed, or regressed)
// divided by the start-of-cycle SOH.
Dataset build_dataset(const std::vector<aging::AgingTestResult>& results, Mode mode,
                      int window = 21, double mad_k = 3.0);

// File formats shared with the CLI.
std::vector<aging::AgingTestResult> load_results_csv(const std::filesystem::path& path);
std::string dataset_csv(const Dataset& ds);
Dataset dataset_from_csv(const std::string& text, Mode mode);
std::string norm_stats_json(const NormStats& stats);
NormStats norm_stats_from_json(const std::string& text);

}  // namespace bdms::dataprep

#endif
