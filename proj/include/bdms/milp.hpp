#ifndef BDMS_MILP_HPP
#define BDMS_MILP_HPP

#include <Eigen/Core>
#include <limits>
#include <string>
#include <vector>

namespace bdms::milp {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Mixed-integer linear program in the form
//   minimize  c . x
//   subject to row_lo <= A x <= row_hi,  col_lo <= x <= col_hi,
// with selected variables integral. Rows are stored sparse and densified by
// the solver.
struct Model {
    struct Term {
        int var;
        double coeff;
    };
    struct Row {
        double lo;
        double hi;
        std::vector<Term> terms;
        std::string name;
    };

    std::vector<double> cost;
    std::vector<double> col_lo;
    std::vector<double> col_hi;
    std::vector<bool> is_integer;
    std::vector<Row> rows;

    int add_var(double lo, double hi, double cost_coeff = 0.0, bool integer = false,
                const std::string& name = {});
    Row& add_row(double lo, double hi, const std::string& name = {});

    int num_vars() const { return static_cast<int>(cost.size()); }
    std::vector<std::string> var_names;  // optional, for diagnostics
};

enum class Status { optimal, infeasible, node_limit, time_limit };

struct Solution {
    Status status = Status::infeasible;
    Eigen::VectorXd x;
    double objective = 0.0;
    double gap = 0.0;  // relative optimality gap proved by branch and bound
    long nodes = 0;
};

struct SolveOptions {
    double integer_tol = 1e-6;
    double relative_gap = 1e-6;
    double time_limit_s = 120.0;
    long node_limit = 200000;
};

// Best-first branch and bound over a bounded-variable primal simplex.
// Throws InfeasibleError when the feasible set is empty and TimeoutError
// (carrying the incumbent objective) when a budget is exhausted before the
// gap target is proved.
Solution solve(const Model& model, const SolveOptions& options = {});

// Plain LP solve of the relaxation (integrality ignored); exposed for tests.
Solution solve_relaxation(const Model& model);

}  // namespace bdms::milp

#endif
