#include "bdms/nnbd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "bdms/errors.hpp"
#include "bdms/io_util.hpp"
#include "json.hpp"

namespace bdms::nnbd {

void NetworkSpec::validate() const {
    if (widths.size() < 2) throw DomainError("network needs at least input and output layers");
    if (widths.front() != 5) throw ParameterError("input width must be 5");
    if (widths.back() != 1) throw ParameterError("output width must be 1");
    for (int w : widths) {
        if (w < 1) throw ParameterError("layer widths must be >= 1");
    }
}

void TrainConfig::validate() const {
    if (batch_size < 1) throw ParameterError("batch_size must be >= 1");
    if (max_epochs < 1) throw ParameterError("max_epochs must be >= 1");
    if (!(learning_rate > 0)) throw ParameterError("learning rate must be > 0");
    if (!(decay_factor > 0)) throw ParameterError("decay factor must be > 0");
    if (decay_period < 1) throw ParameterError("decay period must be >= 1");
}

std::ptrdiff_t DegradationModel::parameter_count() const {
    std::ptrdiff_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
    return n;
}

DegradationModel init_network(const NetworkSpec& spec, std::uint64_t seed) {
    spec.validate();
    DegradationModel model;
    model.spec = spec;
    model.seed = seed;
    std::mt19937_64 rng(seed);
    for (int l = 0; l < spec.layers(); ++l) {
        int in = spec.widths[static_cast<std::size_t>(l)];
        int out = spec.widths[static_cast<std::size_t>(l) + 1];
        double scale = 1.0 / std::sqrt(static_cast<double>(in));
        std::uniform_real_distribution<double> uni(-scale, scale);
        Eigen::MatrixXd w(out, in);
        for (int j = 0; j < in; ++j) {
            for (int i = 0; i < out; ++i) w(i, j) = uni(rng);
        }
        model.weights.push_back(std::move(w));
        model.biases.push_back(Eigen::VectorXd::Zero(out));
    }
    return model;
}

double forward_standardized(const DegradationModel& model, const Eigen::VectorXd& x) {
    Eigen::VectorXd a = x;
    const int L = model.spec.layers();
    for (int l = 0; l < L; ++l) {
        a = (model.weights[static_cast<std::size_t>(l)] * a +
             model.biases[static_cast<std::size_t>(l)])
                .eval();
        if (l + 1 < L) a = a.cwiseMax(0.0);
    }
    return a(0);
}

double forward(const DegradationModel& model, const Eigen::Matrix<double, 5, 1>& raw) {
    for (int k = 0; k < 5; ++k) {
        if (!std::isfinite(raw(k))) throw DomainError("feature " + std::to_string(k) + " not finite");
    }
    Eigen::VectorXd x =
        (raw - model.stats.feature_mean).cwiseQuotient(model.stats.feature_var.cwiseSqrt());
    double y_std = forward_standardized(model, x);
    double y = y_std * std::sqrt(model.stats.target_var) + model.stats.target_mean;
    return std::max(0.0, y);
}

double mse(const Eigen::VectorXd& predictions, const Eigen::VectorXd& targets) {
    if (predictions.size() != targets.size() || predictions.size() == 0) {
        throw ParameterError("mse needs equal non-zero lengths");
    }
    return (predictions - targets).squaredNorm() / static_cast<double>(predictions.size());
}

namespace {

bool is_canonical(const NetworkSpec& spec) {
    return spec.widths == std::vector<int>{5, 20, 10, 1};
}

struct ValStats {
    double mse;
    double acc15;
};

// Forward-only pass over a standardized dataset computing standardized MSE
// and raw-scale accuracy at 15% tolerance, in fixed-size chunks.
ValStats evaluate_canonical(const Eigen::Matrix<double, 20, 5>& w1,
                            const Eigen::Matrix<double, 10, 20>& w2,
                            const Eigen::Matrix<double, 1, 10>& w3,
                            const Eigen::Matrix<double, 20, 1>& b1,
                            const Eigen::Matrix<double, 10, 1>& b2, double b3,
                            const dataprep::Dataset& ds, const dataprep::NormStats& stats) {
    const std::ptrdiff_t n = ds.rows();
    const std::ptrdiff_t chunk = 4096;
    const double tsd = std::sqrt(stats.target_var);
    double se = 0.0;
    std::ptrdiff_t hits = 0;
    Eigen::Matrix<double, 20, Eigen::Dynamic> a1(20, chunk);
    Eigen::Matrix<double, 10, Eigen::Dynamic> a2(10, chunk);
    Eigen::Matrix<double, 1, Eigen::Dynamic> z3(1, chunk);
    for (std::ptrdiff_t at = 0; at < n; at += chunk) {
        const std::ptrdiff_t len = std::min(chunk, n - at);
        auto x = ds.features.middleCols(at, len);
        a1.leftCols(len).noalias() = w1 * x;
        a1.leftCols(len).colwise() += b1;
        a1.leftCols(len) = a1.leftCols(len).cwiseMax(0.0);
        a2.leftCols(len).noalias() = w2 * a1.leftCols(len);
        a2.leftCols(len).colwise() += b2;
        a2.leftCols(len) = a2.leftCols(len).cwiseMax(0.0);
        z3.leftCols(len).noalias() = w3 * a2.leftCols(len);
        z3.leftCols(len).array() += b3;
        for (std::ptrdiff_t i = 0; i < len; ++i) {
            double y = ds.target(at + i);
            double d = z3(0, i) - y;
            se += d * d;
            double pred = std::max(0.0, z3(0, i) * tsd + stats.target_mean);
            double truth = y * tsd + stats.target_mean;
            if (std::abs(pred - truth) / std::max(truth, 1e-7) <= 0.15) ++hits;
        }
    }
    return {se / static_cast<double>(n), static_cast<double>(hits) / static_cast<double>(n)};
}

struct CanonicalWeights {
    Eigen::Matrix<double, 20, 5> w1;
    Eigen::Matrix<double, 10, 20> w2;
    Eigen::Matrix<double, 1, 10> w3;
    Eigen::Matrix<double, 20, 1> b1;
    Eigen::Matrix<double, 10, 1> b2;
    double b3;
};

CanonicalWeights load_canonical(const DegradationModel& m) {
    return {m.weights[0], m.weights[1], m.weights[2], m.biases[0], m.biases[1], m.biases[2](0)};
}

void store_canonical(DegradationModel& m, const CanonicalWeights& c) {
    m.weights[0] = c.w1;
    m.weights[1] = c.w2;
    m.weights[2] = c.w3;
    m.biases[0] = c.b1;
    m.biases[1] = c.b2;
    m.biases[2](0) = c.b3;
}

// One epoch of mini-batch gradient descent on the canonical architecture.
// Returns the sample-weighted mean of the per-batch losses; `order` is empty
// for in-place dataset order, otherwise a row permutation.
double epoch_canonical(CanonicalWeights& w, const dataprep::Dataset& ds,
                       const std::vector<std::ptrdiff_t>& order, int batch_size, double lr,
                       int epoch_index) {
    const std::ptrdiff_t n = ds.rows();
    Eigen::Matrix<double, 20, Eigen::Dynamic> z1(20, batch_size), a1(20, batch_size),
        d1(20, batch_size);
    Eigen::Matrix<double, 10, Eigen::Dynamic> z2(10, batch_size), a2(10, batch_size),
        d2(10, batch_size);
    Eigen::Matrix<double, 1, Eigen::Dynamic> z3(1, batch_size), d3(1, batch_size);
    Eigen::Matrix<double, 5, Eigen::Dynamic> xbuf(5, batch_size);
    Eigen::Matrix<double, 1, Eigen::Dynamic> ybuf(1, batch_size);

    double loss_sum = 0.0;
    for (std::ptrdiff_t at = 0; at < n; at += batch_size) {
        const std::ptrdiff_t len = std::min<std::ptrdiff_t>(batch_size, n - at);
        if (!order.empty()) {
            for (std::ptrdiff_t i = 0; i < len; ++i) {
                xbuf.col(i) = ds.features.col(order[static_cast<std::size_t>(at + i)]);
                ybuf(0, i) = ds.target(order[static_cast<std::size_t>(at + i)]);
            }
        }
        using XRef = Eigen::Ref<const Eigen::Matrix<double, 5, Eigen::Dynamic>>;
        XRef x = order.empty() ? XRef(ds.features.middleCols(at, len)) : XRef(xbuf.leftCols(len));
        auto y = order.empty()
                     ? Eigen::Map<const Eigen::Matrix<double, 1, Eigen::Dynamic>>(
                           ds.target.data() + at, 1, len)
                     : Eigen::Map<const Eigen::Matrix<double, 1, Eigen::Dynamic>>(ybuf.data(), 1,
                                                                                  len);
        z1.leftCols(len).noalias() = w.w1 * x;
        z1.leftCols(len).colwise() += w.b1;
        a1.leftCols(len) = z1.leftCols(len).cwiseMax(0.0);
        z2.leftCols(len).noalias() = w.w2 * a1.leftCols(len);
        z2.leftCols(len).colwise() += w.b2;
        a2.leftCols(len) = z2.leftCols(len).cwiseMax(0.0);
        z3.leftCols(len).noalias() = w.w3 * a2.leftCols(len);
        z3.leftCols(len).array() += w.b3;

        const double inv = 1.0 / static_cast<double>(len);
        double batch_loss = (z3.leftCols(len) - y).squaredNorm() * inv;
        if (!std::isfinite(batch_loss)) {
            throw TrainingError("training loss is non-finite", epoch_index);
        }
        loss_sum += batch_loss * static_cast<double>(len);

        d3.leftCols(len) = 2.0 * inv * (z3.leftCols(len) - y);
        d2.leftCols(len).noalias() = w.w3.transpose() * d3.leftCols(len);
        d2.leftCols(len) = (z2.leftCols(len).array() > 0.0).select(d2.leftCols(len), 0.0);
        d1.leftCols(len).noalias() = w.w2.transpose() * d2.leftCols(len);
        d1.leftCols(len) = (z1.leftCols(len).array() > 0.0).select(d1.leftCols(len), 0.0);

        w.w3.noalias() -= lr * (d3.leftCols(len) * a2.leftCols(len).transpose());
        w.b3 -= lr * d3.leftCols(len).sum();
        w.w2.noalias() -= lr * (d2.leftCols(len) * a1.leftCols(len).transpose());
        w.b2 -= lr * d2.leftCols(len).rowwise().sum();
        w.w1.noalias() -= lr * (d1.leftCols(len) * x.transpose());
        w.b1 -= lr * d1.leftCols(len).rowwise().sum();
    }
    return loss_sum / static_cast<double>(n);
}

// Generic (any-width) versions of the same pass, used for non-canonical specs
// such as hand-built toys in tests.
struct GenericBatch {
    std::vector<Eigen::MatrixXd> z, a, d;
};

double epoch_generic(DegradationModel& m, const dataprep::Dataset& ds,
                     const std::vector<std::ptrdiff_t>& order, int batch_size, double lr,
                     int epoch_index) {
    const std::ptrdiff_t n = ds.rows();
    const int L = m.spec.layers();
    double loss_sum = 0.0;
    for (std::ptrdiff_t at = 0; at < n; at += batch_size) {
        const std::ptrdiff_t len = std::min<std::ptrdiff_t>(batch_size, n - at);
        Eigen::MatrixXd x(5, len);
        Eigen::RowVectorXd y(len);
        for (std::ptrdiff_t i = 0; i < len; ++i) {
            std::ptrdiff_t src = order.empty() ? at + i : order[static_cast<std::size_t>(at + i)];
            x.col(i) = ds.features.col(src);
            y(i) = ds.target(src);
        }
        std::vector<Eigen::MatrixXd> z(static_cast<std::size_t>(L)), a(static_cast<std::size_t>(L));
        Eigen::MatrixXd cur = x;
        for (int l = 0; l < L; ++l) {
            z[static_cast<std::size_t>(l)].noalias() = m.weights[static_cast<std::size_t>(l)] * cur;
            z[static_cast<std::size_t>(l)].colwise() += m.biases[static_cast<std::size_t>(l)];
            a[static_cast<std::size_t>(l)] = (l + 1 < L)
                                                 ? z[static_cast<std::size_t>(l)].cwiseMax(0.0)
                                                 : z[static_cast<std::size_t>(l)];
            cur = a[static_cast<std::size_t>(l)];
        }
        const double inv = 1.0 / static_cast<double>(len);
        double batch_loss = (a.back().row(0) - y).squaredNorm() * inv;
        if (!std::isfinite(batch_loss)) {
            throw TrainingError("training loss is non-finite", epoch_index);
        }
        loss_sum += batch_loss * static_cast<double>(len);

        Eigen::MatrixXd delta = 2.0 * inv * (a.back() - y);
        for (int l = L - 1; l >= 0; --l) {
            const Eigen::MatrixXd& below = (l == 0) ? x : a[static_cast<std::size_t>(l - 1)];
            Eigen::MatrixXd gw = delta * below.transpose();
            Eigen::VectorXd gb = delta.rowwise().sum();
            if (l > 0) {
                Eigen::MatrixXd next = m.weights[static_cast<std::size_t>(l)].transpose() * delta;
                delta = (z[static_cast<std::size_t>(l - 1)].array() > 0.0).select(next, 0.0);
            }
            m.weights[static_cast<std::size_t>(l)].noalias() -= lr * gw;
            m.biases[static_cast<std::size_t>(l)].noalias() -= lr * gb;
        }
    }
    return loss_sum / static_cast<double>(n);
}

ValStats evaluate_generic(const DegradationModel& m, const dataprep::Dataset& ds,
                          const dataprep::NormStats& stats) {
    const std::ptrdiff_t n = ds.rows();
    const double tsd = std::sqrt(stats.target_var);
    double se = 0.0;
    std::ptrdiff_t hits = 0;
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double p = forward_standardized(m, ds.features.col(i));
        double y = ds.target(i);
        se += (p - y) * (p - y);
        double pred = std::max(0.0, p * tsd + stats.target_mean);
        double truth = y * tsd + stats.target_mean;
        if (std::abs(pred - truth) / std::max(truth, 1e-7) <= 0.15) ++hits;
    }
    return {se / static_cast<double>(n), static_cast<double>(hits) / static_cast<double>(n)};
}

}  // namespace

std::pair<DegradationModel, TrainReport> train(const dataprep::Dataset& train_set,
                                               const dataprep::Dataset& val_set,
                                               const dataprep::NormStats& stats,
                                               const TrainConfig& config) {
    config.validate();
    if (train_set.rows() == 0 || val_set.rows() == 0) {
        throw ParameterError("train and validation sets must be non-empty");
    }
    const NetworkSpec& spec = config.network;
    DegradationModel model = init_network(spec, config.seed);
    model.stats = stats;

    const bool fast = is_canonical(spec);
    CanonicalWeights cw{};
    if (fast) cw = load_canonical(model);

    std::mt19937_64 shuffle_rng(config.seed ^ 0x5bd1e995u);
    std::vector<std::ptrdiff_t> order;

    TrainReport report;
    double best_val = std::numeric_limits<double>::infinity();
    DegradationModel best = model;
    CanonicalWeights best_cw = cw;

    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        double lr_epoch = config.learning_rate *
                          std::pow(config.decay_factor, (epoch - 1) / config.decay_period);
        if (config.shuffle) {
            order.resize(static_cast<std::size_t>(train_set.rows()));
            std::iota(order.begin(), order.end(), 0);
            std::shuffle(order.begin(), order.end(), shuffle_rng);
        }
        // The loss gradient is averaged over the batch, so the step uses the
        // configured rate directly.
        double train_mse_epoch;
        ValStats val;
        if (fast) {
            train_mse_epoch = epoch_canonical(cw, train_set, order, config.batch_size, lr_epoch, epoch);
            val = evaluate_canonical(cw.w1, cw.w2, cw.w3, cw.b1, cw.b2, cw.b3, val_set, stats);
        } else {
            train_mse_epoch = epoch_generic(model, train_set, order, config.batch_size, lr_epoch, epoch);
            val = evaluate_generic(model, val_set, stats);
        }
        report.epochs.push_back({epoch, train_mse_epoch, val.mse, val.acc15, lr_epoch});
        if (val.mse < best_val) {
            best_val = val.mse;
            report.best_epoch = epoch;
            if (fast) {
                best_cw = cw;
            } else {
                best = model;
            }
        }
    }

    if (fast) {
        store_canonical(model, best_cw);
    } else {
        model = best;
        model.stats = stats;
    }
    model.trained = true;
    model.seed = config.seed;
    model.epochs_run = config.max_epochs;
    model.best_epoch = report.best_epoch;
    model.final_train_mse = report.epochs.back().train_mse;
    model.final_val_mse = best_val;
    return {std::move(model), std::move(report)};
}

Eigen::VectorXd predict_raw(const DegradationModel& model, const dataprep::Dataset& ds,
                            bool standardized) {
    const std::ptrdiff_t n = ds.rows();
    const double tsd = std::sqrt(model.stats.target_var);
    Eigen::VectorXd out(n);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        if (standardized) {
            double p = forward_standardized(model, ds.features.col(i));
            out(i) = std::max(0.0, p * tsd + model.stats.target_mean);
        } else {
            out(i) = forward(model, ds.features.col(i));
        }
    }
    return out;
}

double accuracy(const DegradationModel& model, const dataprep::Dataset& ds, double tol,
                bool standardized) {
    if (!(tol > 0)) throw ParameterError("tolerance must be > 0");
    if (ds.rows() == 0) throw ParameterError("accuracy needs a non-empty dataset");
    const double tsd = std::sqrt(model.stats.target_var);
    Eigen::VectorXd preds = predict_raw(model, ds, standardized);
    std::ptrdiff_t hits = 0;
    for (std::ptrdiff_t i = 0; i < ds.rows(); ++i) {
        double truth = standardized ? ds.target(i) * tsd + model.stats.target_mean : ds.target(i);
        if (std::abs(preds(i) - truth) / std::max(truth, 1e-7) <= tol) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(ds.rows());
}

bool near_kink(const DegradationModel& model, const Eigen::VectorXd& x, double tol) {
    Eigen::VectorXd a = x;
    const int L = model.spec.layers();
    for (int l = 0; l + 1 < L; ++l) {
        Eigen::VectorXd z = model.weights[static_cast<std::size_t>(l)] * a +
                            model.biases[static_cast<std::size_t>(l)];
        for (Eigen::Index i = 0; i < z.size(); ++i) {
            if (std::abs(z(i)) < tol) return true;
        }
        a = z.cwiseMax(0.0);
    }
    return false;
}

namespace {

double sample_loss(const DegradationModel& m, const Eigen::VectorXd& x, double y) {
    double p = forward_standardized(m, x);
    return (p - y) * (p - y);
}

}  // namespace

double gradient_check(const DegradationModel& model, const Eigen::VectorXd& x, double y, double h) {
    if (!(h > 0)) throw ParameterError("finite-difference step must be > 0");
    const int L = model.spec.layers();

    // Analytic gradient of (f(x) - y)^2 on the single sample.
    std::vector<Eigen::VectorXd> z(static_cast<std::size_t>(L)), a(static_cast<std::size_t>(L));
    Eigen::VectorXd cur = x;
    for (int l = 0; l < L; ++l) {
        z[static_cast<std::size_t>(l)] =
            model.weights[static_cast<std::size_t>(l)] * cur + model.biases[static_cast<std::size_t>(l)];
        a[static_cast<std::size_t>(l)] = (l + 1 < L) ? z[static_cast<std::size_t>(l)].cwiseMax(0.0)
                                                     : z[static_cast<std::size_t>(l)];
        cur = a[static_cast<std::size_t>(l)];
    }
    std::vector<Eigen::MatrixXd> gw(static_cast<std::size_t>(L));
    std::vector<Eigen::VectorXd> gb(static_cast<std::size_t>(L));
    Eigen::VectorXd delta(1);
    delta(0) = 2.0 * (a.back()(0) - y);
    for (int l = L - 1; l >= 0; --l) {
        const Eigen::VectorXd& below = (l == 0) ? x : a[static_cast<std::size_t>(l - 1)];
        gw[static_cast<std::size_t>(l)] = delta * below.transpose();
        gb[static_cast<std::size_t>(l)] = delta;
        if (l > 0) {
            Eigen::VectorXd next = model.weights[static_cast<std::size_t>(l)].transpose() * delta;
            delta = (z[static_cast<std::size_t>(l - 1)].array() > 0.0)
                        .select(next, Eigen::VectorXd::Zero(next.size()));
        }
    }

    DegradationModel probe = model;
    double diff_sq = 0.0, analytic_sq = 0.0, numeric_sq = 0.0;
    auto compare = [&](double analytic, double* param) {
        double saved = *param;
        *param = saved + h;
        double up = sample_loss(probe, x, y);
        *param = saved - h;
        double dn = sample_loss(probe, x, y);
        *param = saved;
        double numeric = (up - dn) / (2.0 * h);
        diff_sq += (analytic - numeric) * (analytic - numeric);
        analytic_sq += analytic * analytic;
        numeric_sq += numeric * numeric;
    };
    for (int l = 0; l < L; ++l) {
        auto& w = probe.weights[static_cast<std::size_t>(l)];
        auto& b = probe.biases[static_cast<std::size_t>(l)];
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            compare(gw[static_cast<std::size_t>(l)].data()[i], w.data() + i);
        }
        for (Eigen::Index i = 0; i < b.size(); ++i) {
            compare(gb[static_cast<std::size_t>(l)](i), b.data() + i);
        }
    }
    return std::sqrt(diff_sq) / std::max({std::sqrt(analytic_sq), std::sqrt(numeric_sq), 1e-12});
}

std::string model_json(const DegradationModel& m) {
    nlohmann::ordered_json j;
    j["widths"] = m.spec.widths;
    nlohmann::ordered_json layers = nlohmann::ordered_json::array();
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        nlohmann::ordered_json layer;
        layer["rows"] = m.weights[l].rows();
        layer["cols"] = m.weights[l].cols();
        std::vector<double> w;  // row-major
        w.reserve(static_cast<std::size_t>(m.weights[l].size()));
        for (Eigen::Index r = 0; r < m.weights[l].rows(); ++r) {
            for (Eigen::Index c = 0; c < m.weights[l].cols(); ++c) w.push_back(m.weights[l](r, c));
        }
        layer["weights"] = w;
        layer["biases"] = std::vector<double>(m.biases[l].data(), m.biases[l].data() + m.biases[l].size());
        layers.push_back(std::move(layer));
    }
    j["layers"] = std::move(layers);
    j["norm_stats"] = nlohmann::ordered_json::parse(dataprep::norm_stats_json(m.stats));
    j["fingerprint"] = {{"seed", m.seed},
                        {"epochs_run", m.epochs_run},
                        {"best_epoch", m.best_epoch},
                        {"final_train_mse", m.final_train_mse},
                        {"final_val_mse", m.final_val_mse},
                        {"trained", m.trained}};
    return j.dump(2) + "\n";
}

DegradationModel model_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    DegradationModel m;
    m.spec.widths = j.at("widths").get<std::vector<int>>();
    m.spec.validate();
    for (const auto& layer : j.at("layers")) {
        Eigen::Index rows = layer.at("rows").get<Eigen::Index>();
        Eigen::Index cols = layer.at("cols").get<Eigen::Index>();
        auto w = layer.at("weights").get<std::vector<double>>();
        auto b = layer.at("biases").get<std::vector<double>>();
        if (static_cast<Eigen::Index>(w.size()) != rows * cols ||
            static_cast<Eigen::Index>(b.size()) != rows) {
            throw ParameterError("model JSON: layer shape mismatch");
        }
        Eigen::MatrixXd wm(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) {
                wm(r, c) = w[static_cast<std::size_t>(r * cols + c)];
            }
        }
        m.weights.push_back(std::move(wm));
        m.biases.push_back(Eigen::Map<Eigen::VectorXd>(b.data(), rows).eval());
    }
    if (static_cast<int>(m.weights.size()) != m.spec.layers()) {
        throw ParameterError("model JSON: layer count mismatch");
    }
    m.stats = dataprep::norm_stats_from_json(j.at("norm_stats").dump());
    const auto& fp = j.at("fingerprint");
    m.seed = fp.at("seed").get<std::uint64_t>();
    m.epochs_run = fp.at("epochs_run").get<int>();
    m.best_epoch = fp.at("best_epoch").get<int>();
    m.final_train_mse = fp.at("final_train_mse").get<double>();
    m.final_val_mse = fp.at("final_val_mse").get<double>();
    m.trained = fp.at("trained").get<bool>();
    return m;
}

std::string report_csv(const TrainReport& report) {
    std::string out = "epoch,train_mse,val_mse,val_acc_15,learning_rate\n";
    for (const auto& e : report.epochs) {
        out += std::to_string(e.epoch);
        out += ',';
        io::append_double(out, e.train_mse);
        out += ',';
        io::append_double(out, e.val_mse);
        out += ',';
        io::append_double(out, e.val_acc15);
        out += ',';
        io::append_double(out, e.learning_rate);
        out += '\n';
    }
    return out;
}

}  // namespace bdms::nnbd
