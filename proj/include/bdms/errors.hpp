#ifndef BDMS_ERRORS_HPP
#define BDMS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bdms {

// Invalid value for a domain quantity (out-of-range feature, bad bound, ...).
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid argument to an operation (bad window, mismatched lengths, ...).
struct ParameterError : std::runtime_error {
    explicit ParameterError(const std::string& msg) : std::runtime_error(msg) {}
};

// Operation invoked on an object in the wrong state (e.g. untrained model).
struct StateError : std::runtime_error {
    explicit StateError(const std::string& msg) : std::runtime_error(msg) {}
};

// Optimization problem has an empty feasible set.
struct InfeasibleError : std::runtime_error {
    explicit InfeasibleError(const std::string& msg) : std::runtime_error(msg) {}
};

// Solver exceeded its node/time budget; message carries the incumbent if any.
struct TimeoutError : std::runtime_error {
    explicit TimeoutError(const std::string& msg, double incumbent)
        : std::runtime_error(msg), incumbent_objective(incumbent) {}
    double incumbent_objective;
};

// Training loss became non-finite.
struct TrainingError : std::runtime_error {
    TrainingError(const std::string& msg, int epoch)
        : std::runtime_error(msg), epoch_index(epoch) {}
    int epoch_index;
};

// Iterative process failed to terminate within its configured cap.
struct DivergenceError : std::runtime_error {
    explicit DivergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace bdms

#endif
