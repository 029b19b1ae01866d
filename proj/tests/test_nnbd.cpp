#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "bdms/errors.hpp"
#include "bdms/nnbd.hpp"

using namespace bdms;
using namespace bdms::nnbd;

namespace {

// Standardized synthetic regression problem: target is a smooth positive
// function of the first two features, in "raw" units around 1e-4 so the
// clamp-at-zero path stays realistic.
dataprep::Dataset make_raw(int n, std::uint64_t seed) {
    dataprep::Dataset ds;
    ds.features.resize(5, n);
    ds.target.resize(n);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < 5; ++k) ds.features(k, i) = u(rng);
        double a = ds.features(0, i), b = ds.features(1, i);
        ds.target(i) = 1e-4 * (1.0 + 0.5 * a + 0.3 * b + 0.2 * a * b);
    }
    ds.test_ids = {"synthetic"};
    ds.group_offsets = {0, n};
    return ds;
}

}  // namespace

TEST_CASE("canonical network has 341 parameters") {
    DegradationModel m = init_network(NetworkSpec{}, 1);
    CHECK(m.parameter_count() == 341);
    REQUIRE(m.weights.size() == 3);
    CHECK(m.weights[0].rows() == 20);
    CHECK(m.weights[0].cols() == 5);
    CHECK(m.weights[2].rows() == 1);
    CHECK(m.biases[0].isZero());
}

TEST_CASE("network spec validation") {
    NetworkSpec s;
    s.widths = {4, 20, 1};
    CHECK_THROWS_AS(s.validate(), ParameterError);
    s.widths = {5, 20, 2};
    CHECK_THROWS_AS(s.validate(), ParameterError);
    s.widths = {5, 1};
    CHECK_NOTHROW(s.validate());
}

TEST_CASE("initialization is deterministic in the seed") {
    DegradationModel a = init_network(NetworkSpec{}, 7);
    DegradationModel b = init_network(NetworkSpec{}, 7);
    DegradationModel c = init_network(NetworkSpec{}, 8);
    CHECK(a.weights[1] == b.weights[1]);
    CHECK(a.weights[1] != c.weights[1]);
    // Uniform fan-in scaling: layer 0 entries within +-1/sqrt(5).
    CHECK(a.weights[0].cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(5.0));
}

TEST_CASE("mse of a hand example") {
    Eigen::VectorXd p(2), t(2);
    p << 1, 2;
    t << 0, 4;
    CHECK(mse(p, t) == doctest::Approx(2.5).epsilon(1e-12));
    Eigen::VectorXd q(1);
    CHECK_THROWS_AS(mse(p, q), ParameterError);
}

TEST_CASE("analytic gradients match finite differences off the kink") {
    DegradationModel m = init_network(NetworkSpec{}, 3);
    std::mt19937_64 rng(99);
    std::normal_distribution<double> g(0.0, 1.0);
    int checked = 0;
    for (int trial = 0; trial < 20 && checked < 5; ++trial) {
        Eigen::VectorXd x(5);
        for (int k = 0; k < 5; ++k) x(k) = g(rng);
        if (near_kink(m, x)) continue;
        ++checked;
        CHECK(gradient_check(m, x, 0.37) < 1e-6);
    }
    CHECK(checked == 5);
}

TEST_CASE("gradient check also passes on a non-canonical shape") {
    NetworkSpec s;
    s.widths = {5, 7, 3, 1};
    DegradationModel m = init_network(s, 11);
    Eigen::VectorXd x(5);
    x << 0.3, -1.1, 0.7, 0.2, -0.4;
    if (!near_kink(m, x)) CHECK(gradient_check(m, x, -0.2) < 1e-6);
}

TEST_CASE("training fits a smooth positive target") {
    dataprep::Dataset tr = make_raw(4096, 1);
    dataprep::Dataset va = make_raw(1024, 2);
    dataprep::NormStats stats = dataprep::standardize(tr, {&va});

    TrainConfig cfg;
    cfg.max_epochs = 150;
    cfg.learning_rate = 2e-2;
    cfg.decay_period = 50;
    cfg.batch_size = 64;
    cfg.seed = 5;
    auto [model, report] = train(tr, va, stats, cfg);

    REQUIRE(report.epochs.size() == 150);
    CHECK(model.trained);
    CHECK(report.epochs.front().val_mse > report.epochs.back().val_mse);
    CHECK(report.epochs.back().val_mse < 0.05);
    CHECK(accuracy(model, va, 0.15) > 0.9);
    CHECK(model.best_epoch >= 1);
    CHECK(model.best_epoch <= 150);
    // The checkpointed parameters reproduce the best validation MSE.
    double best = 1e9;
    for (const auto& e : report.epochs) best = std::min(best, e.val_mse);
    CHECK(mse(predict_raw(model, va), // raw-unit predictions vs raw targets
              Eigen::VectorXd((va.target.array() * std::sqrt(stats.target_var) + stats.target_mean)
                                  .cwiseMax(0.0))) <
          best * stats.target_var + 1e-18);
}

TEST_CASE("learning rate decays stepwise") {
    dataprep::Dataset tr = make_raw(512, 3);
    dataprep::Dataset va = make_raw(128, 4);
    dataprep::NormStats stats = dataprep::standardize(tr, {&va});
    TrainConfig cfg;
    cfg.max_epochs = 41;
    cfg.seed = 1;
    auto [model, report] = train(tr, va, stats, cfg);
    CHECK(report.epochs[0].learning_rate == doctest::Approx(1e-3));
    CHECK(report.epochs[19].learning_rate == doctest::Approx(1e-3));
    CHECK(report.epochs[20].learning_rate == doctest::Approx(5e-4));
    CHECK(report.epochs[40].learning_rate == doctest::Approx(2.5e-4));
}

TEST_CASE("generic-width path trains the same API") {
    dataprep::Dataset tr = make_raw(512, 5);
    dataprep::Dataset va = make_raw(128, 6);
    dataprep::NormStats stats = dataprep::standardize(tr, {&va});
    TrainConfig cfg;
    cfg.max_epochs = 60;
    cfg.learning_rate = 2e-2;
    cfg.batch_size = 32;
    cfg.seed = 2;
    cfg.network.widths = {5, 8, 1};
    auto [model, report] = train(tr, va, stats, cfg);
    CHECK(model.spec.widths == std::vector<int>{5, 8, 1});
    CHECK(report.epochs.front().val_mse > report.epochs.back().val_mse);
}

TEST_CASE("forward clamps predictions at zero") {
    DegradationModel m = init_network(NetworkSpec{}, 1);
    m.trained = true;
    m.stats.target_mean = -10.0;  // de-standardized output is pushed negative
    m.stats.target_var = 1e-6;
    Eigen::Matrix<double, 5, 1> x = Eigen::Matrix<double, 5, 1>::Zero();
    CHECK(forward(m, x) >= 0.0);
}

TEST_CASE("model JSON round trip preserves inference exactly") {
    dataprep::Dataset tr = make_raw(512, 7);
    dataprep::Dataset va = make_raw(128, 8);
    dataprep::NormStats stats = dataprep::standardize(tr, {&va});
    TrainConfig cfg;
    cfg.max_epochs = 3;
    cfg.seed = 9;
    auto [model, report] = train(tr, va, stats, cfg);
    DegradationModel back = model_from_json(model_json(model));
    CHECK(back.spec.widths == model.spec.widths);
    CHECK(back.seed == model.seed);
    CHECK(back.best_epoch == model.best_epoch);
    Eigen::Matrix<double, 5, 1> x;
    x << 30.0, 1.5, 0.6, 0.4, 0.93;
    // Stats in the model are raw-unit, so make the probe raw-unit-ish too.
    CHECK(forward(back, x) == forward(model, x));
    CHECK(report_csv(report).find("val_mse") != std::string::npos);
}

TEST_CASE("training rejects bad configs and shape mismatches") {
    dataprep::Dataset tr = make_raw(64, 1);
    dataprep::Dataset va = make_raw(32, 2);
    dataprep::NormStats stats = dataprep::standardize(tr, {&va});
    TrainConfig cfg;
    cfg.batch_size = 0;
    CHECK_THROWS_AS(train(tr, va, stats, cfg), ParameterError);
    cfg = TrainConfig{};
    cfg.learning_rate = -1;
    CHECK_THROWS_AS(train(tr, va, stats, cfg), ParameterError);
}
