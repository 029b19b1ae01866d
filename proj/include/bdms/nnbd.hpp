#ifndef BDMS_NNBD_HPP
#define BDMS_NNBD_HPP

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "bdms/dataprep.hpp"

namespace bdms::nnbd {

// Fully connected rectifier network; identity output. The canonical battery
// surrogate is 5-20-10-1.
struct NetworkSpec {
    std::vector<int> widths{5, 20, 10, 1};

    void validate() const;  // input width 5, output width 1, all widths >= 1
    int layers() const { return static_cast<int>(widths.size()) - 1; }
};

struct TrainConfig {
    int batch_size = 256;
    int max_epochs = 65;
    double learning_rate = 1e-3;
    double decay_factor = 0.5;
    int decay_period = 20;  // epochs between rate decays
    std::uint64_t seed = 0;
    bool shuffle = false;  // defaults off: the cycle series are ordered
    NetworkSpec network;

    void validate() const;
};

struct DegradationModel {
    NetworkSpec spec;
    std::vector<Eigen::MatrixXd> weights;  // weights[l] maps layer l -> l+1
    std::vector<Eigen::VectorXd> biases;
    dataprep::NormStats stats;
    bool trained = false;

    // Training fingerprint.
    std::uint64_t seed = 0;
    int epochs_run = 0;
    int best_epoch = 0;
    double final_train_mse = 0.0;
    double final_val_mse = 0.0;

    std::ptrdiff_t parameter_count() const;
};

struct EpochStats {
    int epoch;  // 1-based
    double train_mse;
    double val_mse;
    double val_acc15;
    double learning_rate;
};

struct TrainReport {
    std::vector<EpochStats> epochs;
    int best_epoch = 0;  // epoch whose parameters the model carries
};

DegradationModel init_network(const NetworkSpec& spec, std::uint64_t seed);

// Raw-feature inference: standardizes inputs with the stored statistics,
// evaluates the network, de-standardizes, clamps at 0.
double forward(const DegradationModel& model, const Eigen::Matrix<double, 5, 1>& raw_features);

// Network output in standardized units (no clamping); general width allowed.
double forward_standardized(const DegradationModel& model, const Eigen::VectorXd& x);

double mse(const Eigen::VectorXd& predictions, const Eigen::VectorXd& targets);

// Plain mini-batch gradient descent with stepwise learning-rate decay;
// batches taken in dataset order unless config.shuffle. Returns the
// parameters from the epoch with the best validation MSE.
std::pair<DegradationModel, TrainReport> train(const dataprep::Dataset& train_set,
                                               const dataprep::Dataset& val_set,
                                               const dataprep::NormStats& stats,
                                               const TrainConfig& config);

// Fraction of rows with |pred - target| / max(target, 1e-7) <= tol, in raw
// target units. `standardized` says whether ds holds standardized values.
double accuracy(const DegradationModel& model, const dataprep::Dataset& ds, double tol,
                bool standardized = true);

// Batch of de-standardized, clamped predictions for a (standardized) dataset.
Eigen::VectorXd predict_raw(const DegradationModel& model, const dataprep::Dataset& ds,
                            bool standardized = true);

// Norm ratio ||g_analytic - g_numeric|| / max(||g_analytic||, ||g_numeric||)
// between the analytic gradient of the squared error on one sample and
// central finite differences over every parameter.
double gradient_check(const DegradationModel& model, const Eigen::VectorXd& x, double y,
                      double h = 1e-5);

// True when some hidden pre-activation sits within `tol` of the rectifier
// kink, where finite differences are invalid.
bool near_kink(const DegradationModel& model, const Eigen::VectorXd& x, double tol = 1e-4);

std::string model_json(const DegradationModel& model);
DegradationModel model_from_json(const std::string& text);
std::string report_csv(const TrainReport& report);

}  // namespace bdms::nnbd

#endif
