#include "bdms/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <optional>
#include <cstdio>
#include <cstdlib>
#include <queue>

#include <Eigen/Dense>

#include "bdms/errors.hpp"

namespace bdms::milp {

int Model::add_var(double lo, double hi, double cost_coeff, bool integer, const std::string& name) {
    if (lo > hi) throw ParameterError("variable lower bound exceeds upper bound: " + name);
    cost.push_back(cost_coeff);
    col_lo.push_back(lo);
    col_hi.push_back(hi);
    is_integer.push_back(integer);
    var_names.push_back(name);
    return static_cast<int>(cost.size()) - 1;
}

Model::Row& Model::add_row(double lo, double hi, const std::string& name) {
    rows.push_back(Row{lo, hi, {}, name});
    return rows.back();
}

namespace {

enum ColStatus : std::int8_t { kAtLower, kAtUpper, kBasic, kFreeZero };

enum class LpStatus { optimal, infeasible, unbounded };

// Optimal basis of a solved LP, reusable as a warm start for a child node
// whose bounds differ from the parent's: costs are unchanged in branch and
// bound, so the parent basis stays dual-feasible and the child re-solves
// with a handful of dual simplex pivots instead of two cold phases.
struct BasisSnapshot {
    std::vector<int> basis;
    std::vector<std::int8_t> stat;
};

// Bounded-variable primal simplex on  A x = 0  with x = (structurals, row
// slacks, artificials); a row  lo <= a.x <= hi  is written  a.x - s = 0 with
// s in [lo, hi]. Phase 1 minimizes the artificial mass from an all-artificial
// basis; phase 2 minimizes the true cost with artificials pinned to zero.
class Simplex {
public:
    Simplex(const Model& model, const Eigen::VectorXd& col_lo, const Eigen::VectorXd& col_hi)
        : m_(static_cast<int>(model.rows.size())), n_(model.num_vars()), N_(n_ + 2 * m_) {
        A_ = Eigen::MatrixXd::Zero(m_, N_);
        lo_ = Eigen::VectorXd::Constant(N_, 0.0);
        hi_ = Eigen::VectorXd::Constant(N_, kInf);
        cost_ = Eigen::VectorXd::Zero(N_);
        for (int j = 0; j < n_; ++j) {
            lo_(j) = col_lo(j);
            hi_(j) = col_hi(j);
            cost_(j) = model.cost[static_cast<std::size_t>(j)];
        }
        for (int i = 0; i < m_; ++i) {
            const auto& row = model.rows[static_cast<std::size_t>(i)];
            for (const auto& t : row.terms) A_(i, t.var) += t.coeff;
            A_(i, n_ + i) = -1.0;  // slack
            lo_(n_ + i) = row.lo;
            hi_(n_ + i) = row.hi;
        }
        dual_tol_ = 1e-9 * (1.0 + cost_.cwiseAbs().maxCoeff());
    }

    LpStatus run() {
        init_phase1();
        LpStatus s = iterate();
        if (s != LpStatus::optimal) return s;
        if (phase1_objective() > 1e-7) return LpStatus::infeasible;
        switch_to_phase2();
        return iterate();
    }

    BasisSnapshot snapshot() const { return {basis_, stat_}; }

    // In-place bound update for a child node, reusing the solved tableau.
    // Nonbasic variables whose active bound moved shift xB_ by one tableau
    // column each; a basic branch variable costs nothing here and gets
    // repaired by the dual simplex.
    void update_bounds(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
        for (int j = 0; j < n_; ++j) {
            if (lo(j) == lo_(j) && hi(j) == hi_(j)) continue;
            double old_val = value(j);
            lo_(j) = lo(j);
            hi_(j) = hi(j);
            auto& st = stat_[static_cast<std::size_t>(j)];
            if (st == kBasic) continue;
            if (st == kAtLower && !std::isfinite(lo_(j))) {
                st = std::isfinite(hi_(j)) ? kAtUpper : kFreeZero;
            } else if (st == kAtUpper && !std::isfinite(hi_(j))) {
                st = std::isfinite(lo_(j)) ? kAtLower : kFreeZero;
            }
            double delta = value(j) - old_val;
            if (delta != 0.0) xB_ -= delta * T_.col(j);
        }
    }

    // Installs a parent-node basis. Returns false when the snapshot cannot be
    // used (shape mismatch, numerical breakdown, dual infeasibility), in
    // which case the caller should fall back to a cold solve.
    bool warm_start(const BasisSnapshot& snap) {
        if (static_cast<int>(snap.basis.size()) != m_ ||
            static_cast<int>(snap.stat.size()) != N_) {
            return false;
        }
        basis_ = snap.basis;
        stat_ = snap.stat;
        row_of_.assign(static_cast<std::size_t>(N_), -1);
        for (int i = 0; i < m_; ++i) {
            int bj = basis_[static_cast<std::size_t>(i)];
            if (bj < 0 || bj >= N_ || stat_[static_cast<std::size_t>(bj)] != kBasic) return false;
            row_of_[static_cast<std::size_t>(bj)] = i;
        }
        // Artificials carry a fixed +1 sign here and stay pinned to zero.
        for (int i = 0; i < m_; ++i) {
            int art = n_ + m_ + i;
            A_(i, art) = 1.0;
            lo_(art) = 0.0;
            hi_(art) = 0.0;
            if (stat_[static_cast<std::size_t>(art)] == kAtUpper) {
                stat_[static_cast<std::size_t>(art)] = kAtLower;
            }
        }
        // Reconcile nonbasic statuses with this node's bounds.
        for (int j = 0; j < N_; ++j) {
            auto& st = stat_[static_cast<std::size_t>(j)];
            if (st == kBasic) continue;
            if (st == kAtLower && !std::isfinite(lo_(j))) {
                st = std::isfinite(hi_(j)) ? kAtUpper : kFreeZero;
            } else if (st == kAtUpper && !std::isfinite(hi_(j))) {
                st = std::isfinite(lo_(j)) ? kAtLower : kFreeZero;
            }
        }
        phase1_ = false;
        active_cost_ = cost_;
        xB_.resize(m_);
        refactor();
        if (!xB_.allFinite() || !T_.allFinite()) return false;
        const double tol = 1e-6 * (1.0 + cost_.cwiseAbs().maxCoeff());
        for (int j = 0; j < n_ + m_; ++j) {
            auto st = stat_[static_cast<std::size_t>(j)];
            if (st == kBasic || hi_(j) - lo_(j) == 0.0) continue;
            double dj = d_(j);
            if (st == kAtLower && dj < -tol) return false;
            if (st == kAtUpper && dj > tol) return false;
            if (st == kFreeZero && std::abs(dj) > tol) return false;
        }
        return true;
    }

    // Dual simplex until primal feasible, then primal cleanup. nullopt means
    // the warm path broke down and the caller should re-solve cold.
    std::optional<LpStatus> run_warm() {
        std::optional<LpStatus> s = dual_iterate();
        if (!s || *s != LpStatus::optimal) return s;
        return iterate();
    }

    double objective() const {
        double obj = 0;
        for (int j = 0; j < n_; ++j) obj += cost_(j) * value(j);
        return obj;
    }

    Eigen::VectorXd structural_values() const {
        Eigen::VectorXd x(n_);
        for (int j = 0; j < n_; ++j) x(j) = value(j);
        return x;
    }

private:
    double value(int j) const {
        switch (stat_[static_cast<std::size_t>(j)]) {
            case kAtLower: return lo_(j);
            case kAtUpper: return hi_(j);
            case kFreeZero: return 0.0;
            case kBasic:
            default: return xB_(row_of_[static_cast<std::size_t>(j)]);
        }
    }

    void init_phase1() {
        stat_.assign(static_cast<std::size_t>(N_), kAtLower);
        row_of_.assign(static_cast<std::size_t>(N_), -1);
        basis_.resize(static_cast<std::size_t>(m_));
        for (int j = 0; j < n_ + m_; ++j) {
            if (std::isfinite(lo_(j)) && std::isfinite(hi_(j))) {
                stat_[static_cast<std::size_t>(j)] =
                    std::abs(lo_(j)) <= std::abs(hi_(j)) ? kAtLower : kAtUpper;
            } else if (std::isfinite(lo_(j))) {
                stat_[static_cast<std::size_t>(j)] = kAtLower;
            } else if (std::isfinite(hi_(j))) {
                stat_[static_cast<std::size_t>(j)] = kAtUpper;
            } else {
                stat_[static_cast<std::size_t>(j)] = kFreeZero;
            }
        }
        Eigen::VectorXd resid = Eigen::VectorXd::Zero(m_);
        for (int j = 0; j < n_ + m_; ++j) {
            double v = value(j);
            if (v != 0.0) resid -= A_.col(j) * v;
        }
        xB_.resize(m_);
        T_ = A_;
        for (int i = 0; i < m_; ++i) {
            int art = n_ + m_ + i;
            double sign = resid(i) >= 0 ? 1.0 : -1.0;
            A_(i, art) = sign;
            T_(i, art) = sign;
            if (sign < 0) T_.row(i) *= -1.0;
            lo_(art) = 0.0;
            hi_(art) = kInf;
            xB_(i) = std::abs(resid(i));
            basis_[static_cast<std::size_t>(i)] = art;
            stat_[static_cast<std::size_t>(art)] = kBasic;
            row_of_[static_cast<std::size_t>(art)] = i;
        }
        phase1_ = true;
        active_cost_ = Eigen::VectorXd::Zero(N_);
        active_cost_.tail(m_).setOnes();
        recompute_reduced_costs();
    }

    double phase1_objective() const {
        double s = 0;
        for (int i = 0; i < m_; ++i) {
            if (basis_[static_cast<std::size_t>(i)] >= n_ + m_) s += xB_(i);
        }
        return s;
    }

    void switch_to_phase2() {
        phase1_ = false;
        active_cost_ = cost_;
        for (int i = 0; i < m_; ++i) hi_(n_ + m_ + i) = 0.0;  // pin artificials
        recompute_reduced_costs();
    }

    void recompute_reduced_costs() {
        d_ = active_cost_.transpose();
        for (int i = 0; i < m_; ++i) {
            double cb = active_cost_(basis_[static_cast<std::size_t>(i)]);
            if (cb != 0.0) d_ -= cb * T_.row(i);
        }
    }

    void refactor() {
        Eigen::MatrixXd B(m_, m_);
        for (int i = 0; i < m_; ++i) B.col(i) = A_.col(basis_[static_cast<std::size_t>(i)]);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
        T_ = lu.solve(A_);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
        for (int j = 0; j < N_; ++j) {
            if (stat_[static_cast<std::size_t>(j)] == kBasic) continue;
            double v = value(j);
            if (v != 0.0) rhs -= A_.col(j) * v;
        }
        xB_ = lu.solve(rhs);
        recompute_reduced_costs();
    }

    LpStatus iterate() {
        const double primal_tol = 1e-9;
        int stall = 0;
        double last_obj = kInf;
        bool bland = false;
        for (long iter = 0; iter < 200000; ++iter) {
            if (iter > 0 && iter % 256 == 0) refactor();

            // Pricing.
            int enter = -1;
            double best = 0.0;
            int direction = 0;
            for (int j = 0; j < N_; ++j) {
                auto st = stat_[static_cast<std::size_t>(j)];
                if (st == kBasic) continue;
                if (phase1_ == false && j >= n_ + m_) continue;  // artificials pinned
                double dj = d_(j);
                int dir = 0;
                if ((st == kAtLower || st == kFreeZero) && dj < -dual_tol_) dir = 1;
                else if ((st == kAtUpper || st == kFreeZero) && dj > dual_tol_) dir = -1;
                if (dir == 0) continue;
                if (bland) {
                    enter = j;
                    direction = dir;
                    break;
                }
                if (std::abs(dj) > best) {
                    best = std::abs(dj);
                    enter = j;
                    direction = dir;
                }
            }
            if (enter < 0) return LpStatus::optimal;

            // Ratio test: entering moves by t >= 0 in `direction`.
            const double piv_tol = 1e-9;
            double t_limit = kInf;
            int leave_row = -1;
            bool leave_at_upper = false;
            double self_span = hi_(enter) - lo_(enter);
            if (std::isfinite(self_span)) t_limit = self_span;
            for (int i = 0; i < m_; ++i) {
                double delta = direction * T_(i, enter);
                int bj = basis_[static_cast<std::size_t>(i)];
                if (delta > piv_tol) {
                    if (!std::isfinite(lo_(bj))) continue;
                    double t = (xB_(i) - lo_(bj)) / delta;
                    if (t < -primal_tol) t = 0;
                    if (t < t_limit - 1e-12 ||
                        (t < t_limit + 1e-12 && leave_row >= 0 &&
                         std::abs(T_(i, enter)) > std::abs(T_(leave_row, enter)))) {
                        t_limit = std::max(0.0, t);
                        leave_row = i;
                        leave_at_upper = false;
                    }
                } else if (delta < -piv_tol) {
                    if (!std::isfinite(hi_(bj))) continue;
                    double t = (hi_(bj) - xB_(i)) / (-delta);
                    if (t < -primal_tol) t = 0;
                    if (t < t_limit - 1e-12 ||
                        (t < t_limit + 1e-12 && leave_row >= 0 &&
                         std::abs(T_(i, enter)) > std::abs(T_(leave_row, enter)))) {
                        t_limit = std::max(0.0, t);
                        leave_row = i;
                        leave_at_upper = true;
                    }
                }
            }
            if (!std::isfinite(t_limit)) return LpStatus::unbounded;

            double obj_before = active_cost_.dot(full_vector());
            if (leave_row < 0) {
                // Bound flip: entering runs to its opposite bound.
                xB_ -= direction * t_limit * T_.col(enter);
                stat_[static_cast<std::size_t>(enter)] =
                    (direction > 0) ? kAtUpper : kAtLower;
            } else {
                double enter_val = value(enter) + direction * t_limit;
                int leave_var = basis_[static_cast<std::size_t>(leave_row)];
                xB_ -= direction * t_limit * T_.col(enter);
                xB_(leave_row) = enter_val;
                stat_[static_cast<std::size_t>(leave_var)] = leave_at_upper ? kAtUpper : kAtLower;
                row_of_[static_cast<std::size_t>(leave_var)] = -1;
                stat_[static_cast<std::size_t>(enter)] = kBasic;
                row_of_[static_cast<std::size_t>(enter)] = leave_row;
                basis_[static_cast<std::size_t>(leave_row)] = enter;

                double pivot = T_(leave_row, enter);
                T_.row(leave_row) /= pivot;
                double dq = d_(enter);
                if (dq != 0.0) d_ -= dq * T_.row(leave_row);
                Eigen::VectorXd col = T_.col(enter);
                col(leave_row) = 0.0;
                T_.noalias() -= col * T_.row(leave_row);
            }

            double obj_after = active_cost_.dot(full_vector());
            if (obj_after < obj_before - 1e-12) {
                stall = 0;
            } else if (++stall > 300 && !bland) {
                bland = true;
                stall = 0;
            }
            (void)last_obj;
        }
        throw std::runtime_error("simplex iteration limit exceeded");
    }

    // Bounded-variable dual simplex: repairs primal feasibility after bound
    // changes while keeping dual feasibility. Returns optimal once every
    // basic value is inside its bounds, infeasible on dual unboundedness,
    // nullopt when the pivot budget runs out.
    std::optional<LpStatus> dual_iterate() {
        const double feas_tol = 1e-8;
        for (long iter = 0; iter < 20000; ++iter) {
            if (iter > 0 && iter % 256 == 0) refactor();

            // Leaving variable: most violated basic bound.
            int r = -1;
            bool below = false;
            double worst = feas_tol;
            for (int i = 0; i < m_; ++i) {
                int bj = basis_[static_cast<std::size_t>(i)];
                double v = xB_(i);
                if (v < lo_(bj) - worst) {
                    worst = lo_(bj) - v;
                    r = i;
                    below = true;
                } else if (v > hi_(bj) + worst) {
                    worst = v - hi_(bj);
                    r = i;
                    below = false;
                }
            }
            if (r < 0) return LpStatus::optimal;
            int bvar = basis_[static_cast<std::size_t>(r)];

            // Entering variable: min dual ratio among columns that can move
            // xB_(r) toward the violated bound.
            const double piv_tol = 1e-9;
            int enter = -1;
            int dir = 0;
            double best_ratio = kInf;
            double best_piv = 0.0;
            for (int j = 0; j < n_ + m_; ++j) {
                auto st = stat_[static_cast<std::size_t>(j)];
                if (st == kBasic || hi_(j) - lo_(j) == 0.0) continue;
                double a = T_(r, j);
                if (std::abs(a) < piv_tol) continue;
                // xB_(r) changes by -dir * t * a for entering step t > 0.
                int want = 0;  // direction that moves xB_(r) the right way
                if (below) {
                    want = a < 0 ? 1 : -1;
                } else {
                    want = a > 0 ? 1 : -1;
                }
                if (st == kAtLower && want != 1) continue;
                if (st == kAtUpper && want != -1) continue;
                double ratio = std::abs(d_(j)) / std::abs(a);
                if (ratio < best_ratio - 1e-12 ||
                    (ratio < best_ratio + 1e-12 && std::abs(a) > best_piv)) {
                    best_ratio = ratio;
                    best_piv = std::abs(a);
                    enter = j;
                    dir = want;
                }
            }
            if (enter < 0) {
                // Dual unbounded: a residual violation this small is noise,
                // anything larger is a sound primal-infeasibility proof.
                return worst <= 1e-5 ? LpStatus::optimal : LpStatus::infeasible;
            }

            double target = below ? lo_(bvar) : hi_(bvar);
            double t = (xB_(r) - target) / (dir * T_(r, enter));
            if (!(t >= 0) || !std::isfinite(t)) return std::nullopt;

            double enter_val = value(enter) + dir * t;
            xB_ -= dir * t * T_.col(enter);
            xB_(r) = enter_val;
            stat_[static_cast<std::size_t>(bvar)] = below ? kAtLower : kAtUpper;
            row_of_[static_cast<std::size_t>(bvar)] = -1;
            stat_[static_cast<std::size_t>(enter)] = kBasic;
            row_of_[static_cast<std::size_t>(enter)] = r;
            basis_[static_cast<std::size_t>(r)] = enter;

            double pivot = T_(r, enter);
            T_.row(r) /= pivot;
            double dq = d_(enter);
            if (dq != 0.0) d_ -= dq * T_.row(r);
            Eigen::VectorXd col = T_.col(enter);
            col(r) = 0.0;
            T_.noalias() -= col * T_.row(r);
        }
        return std::nullopt;
    }

    Eigen::VectorXd full_vector() const {
        Eigen::VectorXd x(N_);
        for (int j = 0; j < N_; ++j) x(j) = value(j);
        return x;
    }

    int m_, n_, N_;
    Eigen::MatrixXd A_, T_;
    Eigen::VectorXd lo_, hi_, cost_, active_cost_, xB_;
    Eigen::RowVectorXd d_;
    std::vector<int> basis_;
    std::vector<std::int8_t> stat_;
    std::vector<int> row_of_;
    bool phase1_ = true;
    double dual_tol_ = 1e-9;
};

struct LpResult {
    LpStatus status;
    double objective = 0;
    Eigen::VectorXd x;
};

struct LpStats {
    long cold = 0, warm_ok = 0, warm_reject = 0, warm_breakdown = 0, warm_infeas = 0;
};
LpStats g_lp_stats;  // diagnostic only; read under BDMS_MILP_STATS

LpResult solve_lp(const Model& model, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                  const BasisSnapshot* warm = nullptr, BasisSnapshot* basis_out = nullptr) {
    for (int j = 0; j < model.num_vars(); ++j) {
        if (lo(j) > hi(j) + 1e-12) return {LpStatus::infeasible, 0, {}};
    }
    Simplex simplex(model, lo, hi);
    std::optional<LpStatus> s;
    if (warm) {
        if (simplex.warm_start(*warm)) {
            s = simplex.run_warm();
            if (!s) ++g_lp_stats.warm_breakdown;
            else if (*s == LpStatus::infeasible) ++g_lp_stats.warm_infeas;
            else ++g_lp_stats.warm_ok;
        } else {
            ++g_lp_stats.warm_reject;
        }
    }
    if (!s || *s == LpStatus::infeasible) {
        ++g_lp_stats.cold;
        // No usable warm basis, warm pivoting broke down, or the warm path
        // claims infeasibility (re-verified cold so that pruning stays safe).
        Simplex cold(model, lo, hi);
        LpStatus cs = cold.run();
        if (cs != LpStatus::optimal) return {cs, 0, {}};
        if (basis_out) *basis_out = cold.snapshot();
        return {cs, cold.objective(), cold.structural_values()};
    }
    if (*s != LpStatus::optimal) return {*s, 0, {}};
    if (basis_out) *basis_out = simplex.snapshot();
    return {*s, simplex.objective(), simplex.structural_values()};
}

struct Node {
    double bound;
    Eigen::VectorXd lo, hi;
    std::shared_ptr<const BasisSnapshot> warm;
    // Branch that created this node, for pseudocost updates.
    int branch_var = -1;
    int branch_dir = 0;        // -1 = floor child, +1 = ceil child
    double branch_frac = 0.0;  // fractional distance moved by the branch
    bool operator<(const Node& other) const { return bound > other.bound; }  // min-heap
};

// Per-variable average LP-bound gain per unit of fractional distance, learned
// from solved children; drives branching-variable selection.
struct PseudoCost {
    double up_sum = 0.0, down_sum = 0.0;
    long up_n = 0, down_n = 0;
};

}  // namespace

Solution solve_relaxation(const Model& model) {
    Eigen::VectorXd lo = Eigen::Map<const Eigen::VectorXd>(model.col_lo.data(), model.num_vars());
    Eigen::VectorXd hi = Eigen::Map<const Eigen::VectorXd>(model.col_hi.data(), model.num_vars());
    LpResult r = solve_lp(model, lo, hi);
    if (r.status == LpStatus::infeasible) throw InfeasibleError("LP relaxation infeasible");
    if (r.status == LpStatus::unbounded) throw InfeasibleError("LP relaxation unbounded");
    Solution s;
    s.status = Status::optimal;
    s.objective = r.objective;
    s.x = r.x;
    return s;
}

Solution solve(const Model& model, const SolveOptions& options) {
    const bool stats = std::getenv("BDMS_MILP_STATS") != nullptr;
    if (stats) g_lp_stats = {};
    struct StatsPrinter {
        bool on;
        long* nodes;
        ~StatsPrinter() {
            if (!on) return;
            std::fprintf(stderr,
                         "[milp] nodes=%ld cold=%ld warm_ok=%ld warm_reject=%ld "
                         "warm_breakdown=%ld warm_infeas=%ld\n",
                         *nodes, g_lp_stats.cold, g_lp_stats.warm_ok, g_lp_stats.warm_reject,
                         g_lp_stats.warm_breakdown, g_lp_stats.warm_infeas);
        }
    };
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    Eigen::VectorXd root_lo =
        Eigen::Map<const Eigen::VectorXd>(model.col_lo.data(), model.num_vars());
    Eigen::VectorXd root_hi =
        Eigen::Map<const Eigen::VectorXd>(model.col_hi.data(), model.num_vars());

    std::priority_queue<Node> queue;
    queue.push({-kInf, root_lo, root_hi});
    // Plunging stack: after branching, the round-to-nearest child is explored
    // depth-first so an incumbent appears early; siblings go to the
    // best-first heap, which remains the optimality backbone.
    std::vector<Node> dive;

    std::vector<PseudoCost> pseudo(static_cast<std::size_t>(model.num_vars()));
    double pc_global_sum = 0.0;
    long pc_global_n = 0;

    bool have_incumbent = false;
    double incumbent = kInf;
    Eigen::VectorXd best_x;
    double global_lb = -kInf;
    long nodes = 0;
    StatsPrinter stats_printer{stats, &nodes};
    bool root_lp_feasible = false;

    auto remaining_lb = [&] {
        double lb = queue.empty() ? kInf : queue.top().bound;
        for (const Node& n : dive) lb = std::min(lb, n.bound);
        return lb;
    };

    // The Simplex that solved the most recent branched node; a dive child
    // reuses it in place (bound tweak + dual pivots), avoiding the tableau
    // rebuild that dominates node cost.
    std::unique_ptr<Simplex> cur;
    bool cur_is_dive_parent = false;

    while (!queue.empty() || !dive.empty()) {
        Node node;
        bool from_dive = false;
        if (!dive.empty()) {
            node = std::move(dive.back());
            dive.pop_back();
            from_dive = true;
        } else {
            node = std::move(const_cast<Node&>(queue.top()));
            queue.pop();
        }
        double cutoff = incumbent - options.relative_gap * (1.0 + std::abs(incumbent));
        if (have_incumbent && node.bound >= cutoff) {
            if (dive.empty() && (queue.empty() || queue.top().bound >= cutoff)) {
                global_lb = incumbent;
                break;  // every remaining node is at least as bad
            }
            continue;
        }
        global_lb = std::min(node.bound, remaining_lb());
        if (nodes >= options.node_limit || elapsed() > options.time_limit_s) {
            if (!have_incumbent) {
                throw TimeoutError("branch and bound budget exhausted with no incumbent", kInf);
            }
            Solution s;
            s.status = nodes >= options.node_limit ? Status::node_limit : Status::time_limit;
            s.objective = incumbent;
            s.x = best_x;
            s.nodes = nodes;
            s.gap = std::abs(incumbent - global_lb) / (1.0 + std::abs(incumbent));
            return s;
        }
        ++nodes;
        LpResult lp;
        bool reused = false;
        if (from_dive && cur_is_dive_parent && cur) {
            cur->update_bounds(node.lo, node.hi);
            std::optional<LpStatus> ws = cur->run_warm();
            if (ws) {
                lp.status = *ws;
                if (*ws == LpStatus::optimal) {
                    lp.objective = cur->objective();
                    lp.x = cur->structural_values();
                }
                reused = true;
                ++g_lp_stats.warm_ok;
            }
        }
        cur_is_dive_parent = false;
        if (!reused) {
            cur = std::make_unique<Simplex>(model, node.lo, node.hi);
            std::optional<LpStatus> ws;
            if (node.warm && cur->warm_start(*node.warm)) {
                ws = cur->run_warm();
                if (ws) ++g_lp_stats.warm_ok;
                else ++g_lp_stats.warm_breakdown;
            } else if (node.warm) {
                ++g_lp_stats.warm_reject;
            }
            if (!ws) {
                cur = std::make_unique<Simplex>(model, node.lo, node.hi);
                ws = cur->run();
                ++g_lp_stats.cold;
            }
            lp.status = *ws;
            if (*ws == LpStatus::optimal) {
                lp.objective = cur->objective();
                lp.x = cur->structural_values();
            }
        }
        if (lp.status == LpStatus::unbounded) {
            throw InfeasibleError("LP relaxation unbounded");
        }
        if (lp.status == LpStatus::infeasible) {
            ++g_lp_stats.warm_infeas;
            continue;
        }
        root_lp_feasible = true;
        if (node.branch_var >= 0 && node.branch_frac > 1e-9) {
            double gain = std::max(0.0, lp.objective - node.bound) / node.branch_frac;
            auto& p = pseudo[static_cast<std::size_t>(node.branch_var)];
            if (node.branch_dir > 0) {
                p.up_sum += gain;
                ++p.up_n;
            } else {
                p.down_sum += gain;
                ++p.down_n;
            }
            pc_global_sum += gain;
            ++pc_global_n;
        }
        if (have_incumbent &&
            lp.objective >= incumbent - options.relative_gap * (1.0 + std::abs(incumbent))) {
            continue;
        }

        // Pseudocost branching: estimate each direction's LP-bound gain from
        // past branches on the variable; unseen directions fall back to the
        // global average weighted by the variable's objective coefficient, so
        // cost-bearing binaries are explored before free indicator binaries.
        double pc_fallback = pc_global_n > 0 ? pc_global_sum / static_cast<double>(pc_global_n)
                                             : 1.0;
        int branch_var = -1;
        double best_score = -1.0;
        double best_frac_dist = 0.0;
        for (int j = 0; j < model.num_vars(); ++j) {
            if (!model.is_integer[static_cast<std::size_t>(j)]) continue;
            double v = lp.x(j);
            double frac = v - std::floor(v);
            double dist = std::min(frac, 1.0 - frac);
            if (dist <= options.integer_tol) continue;
            const auto& p = pseudo[static_cast<std::size_t>(j)];
            double weight = 1.0 + std::abs(model.cost[static_cast<std::size_t>(j)]);
            double up = p.up_n > 0 ? p.up_sum / static_cast<double>(p.up_n) : pc_fallback * weight;
            double down =
                p.down_n > 0 ? p.down_sum / static_cast<double>(p.down_n) : pc_fallback * weight;
            double score = (1e-6 + up * (1.0 - frac)) * (1e-6 + down * frac);
            if (score > best_score + 1e-12 ||
                (score > best_score - 1e-12 && dist > best_frac_dist + 1e-12)) {
                best_score = score;
                best_frac_dist = dist;
                branch_var = j;
            }
        }
        if (branch_var < 0) {
            if (lp.objective < incumbent) {
                incumbent = lp.objective;
                best_x = lp.x;
                // Snap integer coordinates exactly.
                for (int j = 0; j < model.num_vars(); ++j) {
                    if (model.is_integer[static_cast<std::size_t>(j)]) {
                        best_x(j) = std::round(best_x(j));
                    }
                }
                have_incumbent = true;
            }
            continue;
        }
        double v = lp.x(branch_var);
        double frac = v - std::floor(v);
        auto warm = std::make_shared<const BasisSnapshot>(cur->snapshot());
        Node down{lp.objective, node.lo, node.hi, warm, branch_var, -1, frac};
        down.hi(branch_var) = std::floor(v);
        Node up{lp.objective, std::move(node.lo), std::move(node.hi), warm, branch_var, +1,
                1.0 - frac};
        up.lo(branch_var) = std::ceil(v);
        if (v - std::floor(v) >= 0.5) {
            queue.push(std::move(down));
            dive.push_back(std::move(up));
        } else {
            queue.push(std::move(up));
            dive.push_back(std::move(down));
        }
        cur_is_dive_parent = true;  // `cur` solved this node; the dive child reuses it
    }

    if (!have_incumbent) {
        throw InfeasibleError(root_lp_feasible ? "no integer feasible solution"
                                               : "LP relaxation infeasible");
    }
    Solution s;
    s.status = Status::optimal;
    s.objective = incumbent;
    s.x = best_x;
    s.nodes = nodes;
    s.gap = 0.0;
    return s;
}

}  // namespace bdms::milp
