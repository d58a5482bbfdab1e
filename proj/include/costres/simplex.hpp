#pragma once

// Bounded dual simplex on the computational form
//
//     min c'x   s.t.   A x - s = 0,   l <= (x, s) <= u,
//
// where s holds one logical variable per row. Every variable is kept boxed: infinite
// structural bounds are replaced by a large artificial box (reported as unboundedness
// when active at the optimum) and infinite row sides by the row's implied activity
// bound, which never cuts anything off. Boxed nonbasic variables can always be moved to
// the bound that matches the sign of their reduced cost, so any basis is a valid dual
// feasible start. That makes the same routine serve cold solves and warm starts after
// bound changes in branch and bound.
//
// Pricing uses dual steepest edge with a Harris two-pass ratio test. When the dual
// objective stalls for a while, the method switches to Bland's smallest-index rule
// for the rest of the solve, which cannot cycle.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "costres/instance.hpp"
#include "costres/lu.hpp"

namespace costres::lp {

enum class Status { optimal, infeasible, unbounded, iteration_limit, numerical_failure };

enum VarState : std::int8_t { kBasic = 0, kAtLower = 1, kAtUpper = 2 };

/// Basis snapshot usable as a warm start for a model of the same shape.
struct Basis {
    std::vector<int> head;              // variable index per basis position
    std::vector<std::int8_t> state;     // per variable (structurals then logicals)
    [[nodiscard]] bool empty() const { return head.empty(); }
};

struct Tolerances {
    double primal = 1e-9;
    double dual = 1e-9;
    double pivot = 1e-9;
    double artificial_bound = 1e9;
};

/// Immutable matrix data shared by every solve of one model.
class Model {
public:
    explicit Model(const ProblemInstance& inst, Tolerances tol = {}) : tol_(tol) {
        const auto& vars = inst.variables();
        const auto& rows = inst.constraints();
        n_ = static_cast<int>(vars.size());
        m_ = static_cast<int>(rows.size());
        cost_.assign(static_cast<std::size_t>(n_ + m_), 0.0);
        for (int j = 0; j < n_; ++j) cost_[static_cast<std::size_t>(j)] = vars[static_cast<std::size_t>(j)].objective;

        // Row-wise storage, merging duplicate entries.
        row_start_.assign(1, 0);
        std::vector<double> acc(static_cast<std::size_t>(n_), 0.0);
        std::vector<int> seen;
        for (const auto& r : rows) {
            seen.clear();
            for (const auto& t : r.terms) {
                if (acc[static_cast<std::size_t>(t.var)] == 0.0) seen.push_back(t.var);
                acc[static_cast<std::size_t>(t.var)] += t.coef;
                if (acc[static_cast<std::size_t>(t.var)] == 0.0) acc[static_cast<std::size_t>(t.var)] = 1e-300;
            }
            std::sort(seen.begin(), seen.end());
            for (int j : seen) {
                double v = acc[static_cast<std::size_t>(j)];
                acc[static_cast<std::size_t>(j)] = 0.0;
                if (v == 1e-300 || v == 0.0) continue;
                row_col_.push_back(j);
                row_val_.push_back(v);
            }
            row_start_.push_back(static_cast<int>(row_col_.size()));
        }
        // Column-wise copy.
        col_start_.assign(static_cast<std::size_t>(n_ + 1), 0);
        for (int j : row_col_) ++col_start_[static_cast<std::size_t>(j + 1)];
        for (int j = 0; j < n_; ++j) col_start_[static_cast<std::size_t>(j + 1)] += col_start_[static_cast<std::size_t>(j)];
        col_row_.resize(row_col_.size());
        col_val_.resize(row_col_.size());
        std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
        for (int i = 0; i < m_; ++i)
            for (int p = row_start_[static_cast<std::size_t>(i)]; p < row_start_[static_cast<std::size_t>(i + 1)]; ++p) {
                int j = row_col_[static_cast<std::size_t>(p)];
                auto& f = fill[static_cast<std::size_t>(j)];
                col_row_[static_cast<std::size_t>(f)] = i;
                col_val_[static_cast<std::size_t>(f)] = row_val_[static_cast<std::size_t>(p)];
                ++f;
            }

        // Structural bounds (artificial where infinite).
        lower_.resize(static_cast<std::size_t>(n_ + m_));
        upper_.resize(static_cast<std::size_t>(n_ + m_));
        artificial_.assign(static_cast<std::size_t>(n_), 0);
        for (int j = 0; j < n_; ++j) {
            const auto& v = vars[static_cast<std::size_t>(j)];
            double lo = v.lower, hi = v.upper;
            if (lo == -kInf) {
                lo = -tol_.artificial_bound;
                artificial_[static_cast<std::size_t>(j)] |= 1;
            }
            if (hi == kInf) {
                hi = tol_.artificial_bound;
                artificial_[static_cast<std::size_t>(j)] |= 2;
            }
            lower_[static_cast<std::size_t>(j)] = lo;
            upper_[static_cast<std::size_t>(j)] = hi;
        }
        // Row bounds on the logicals; infinite sides closed by implied activity.
        for (int i = 0; i < m_; ++i) {
            double amin = 0.0, amax = 0.0;
            for (int p = row_start_[static_cast<std::size_t>(i)]; p < row_start_[static_cast<std::size_t>(i + 1)]; ++p) {
                int j = row_col_[static_cast<std::size_t>(p)];
                double a = row_val_[static_cast<std::size_t>(p)];
                double lo = lower_[static_cast<std::size_t>(j)], hi = upper_[static_cast<std::size_t>(j)];
                amin += a > 0 ? a * lo : a * hi;
                amax += a > 0 ? a * hi : a * lo;
            }
            const auto& r = rows[static_cast<std::size_t>(i)];
            double lo = r.sense == Sense::le ? -kInf : r.rhs;
            double hi = r.sense == Sense::ge ? kInf : r.rhs;
            double slack = 1.0 + 1e-6 * (std::abs(amin) + std::abs(amax));
            if (lo == -kInf) lo = std::min(amin - slack, hi);
            if (hi == kInf) hi = std::max(amax + slack, lo);
            lower_[static_cast<std::size_t>(n_ + i)] = lo;
            upper_[static_cast<std::size_t>(n_ + i)] = hi;
        }
    }

    [[nodiscard]] int cols() const { return n_; }
    [[nodiscard]] int rows() const { return m_; }
    [[nodiscard]] const Tolerances& tolerances() const { return tol_; }
    [[nodiscard]] double cost(int j) const { return cost_[static_cast<std::size_t>(j)]; }
    [[nodiscard]] const std::vector<double>& lower() const { return lower_; }
    [[nodiscard]] const std::vector<double>& upper() const { return upper_; }
    [[nodiscard]] bool artificial_lower(int j) const { return j < n_ && (artificial_[static_cast<std::size_t>(j)] & 1); }
    [[nodiscard]] bool artificial_upper(int j) const { return j < n_ && (artificial_[static_cast<std::size_t>(j)] & 2); }

    template <class F>
    void for_column(int j, F&& f) const {
        if (j >= n_) {
            f(j - n_, -1.0);
            return;
        }
        for (int p = col_start_[static_cast<std::size_t>(j)]; p < col_start_[static_cast<std::size_t>(j + 1)]; ++p)
            f(col_row_[static_cast<std::size_t>(p)], col_val_[static_cast<std::size_t>(p)]);
    }

    template <class F>
    void for_row(int i, F&& f) const {
        for (int p = row_start_[static_cast<std::size_t>(i)]; p < row_start_[static_cast<std::size_t>(i + 1)]; ++p)
            f(row_col_[static_cast<std::size_t>(p)], row_val_[static_cast<std::size_t>(p)]);
    }

private:
    Tolerances tol_;
    int n_ = 0;
    int m_ = 0;
    std::vector<double> cost_;
    std::vector<int> row_start_, row_col_;
    std::vector<double> row_val_;
    std::vector<int> col_start_, col_row_;
    std::vector<double> col_val_;
    std::vector<double> lower_, upper_;
    std::vector<std::uint8_t> artificial_;
};

struct Result {
    Status status = Status::numerical_failure;
    double objective = 0.0;     // c'x without the instance offset
    std::vector<double> x;      // structural values
    Basis basis;
    long iterations = 0;
};

/// One dual simplex run on a model, with per-solve structural bound overrides.
class DualSimplex {
public:
    using Vector = Eigen::VectorXd;

    explicit DualSimplex(const Model& model) : model_(model) {}

    /// `lower`/`upper` override structural bounds (size n; infinite values allowed).
    Result solve(const std::vector<double>* lower = nullptr, const std::vector<double>* upper = nullptr,
                 const Basis* warm = nullptr, long max_iterations = -1) {
        setup_bounds(lower, upper);
        const int n = model_.cols(), m = model_.rows();
        const int total = n + m;
        if (max_iterations < 0) max_iterations = 200L * (total + 10);
        Result res;
        for (int j = 0; j < n; ++j)
            if (lo_[static_cast<std::size_t>(j)] > hi_[static_cast<std::size_t>(j)]) {
                res.status = Status::infeasible;
                return res;
            }

        if (warm && static_cast<int>(warm->head.size()) == m && static_cast<int>(warm->state.size()) == total) {
            head_ = warm->head;
            state_ = warm->state;
        } else {
            slack_basis();
        }
        x_.assign(static_cast<std::size_t>(total), 0.0);
        d_.assign(static_cast<std::size_t>(total), 0.0);
        if (!refactor()) {
            slack_basis();
            if (!refactor()) {
                res.status = Status::numerical_failure;
                return res;
            }
        }
        dse_.assign(static_cast<std::size_t>(m), 1.0);
        recompute_duals();
        make_dual_feasible();
        recompute_primals();

        bool bland = false;
        long stall = 0;
        double last_obj = -kInf;
        long iter = 0;
        int retries = 0;
        Vector rho(m), alpha_q(m), tau(m);
        std::vector<double> alpha_row(static_cast<std::size_t>(total), 0.0);
        std::vector<int> touched;
        touched.reserve(static_cast<std::size_t>(total));

        const auto& tol = model_.tolerances();
        while (true) {
            if (iter >= max_iterations) {
                res.status = Status::iteration_limit;
                break;
            }
            int r = choose_leaving(bland);
            if (r < 0) {
                // Confirm on a fresh factorization before declaring optimality.
                if (factor_.updates() > 0) {
                    if (!refactor()) {
                        res.status = Status::numerical_failure;
                        break;
                    }
                    recompute_duals();
                    make_dual_feasible();
                    recompute_primals();
                    if (choose_leaving(bland) >= 0) continue;
                }
                res.status = Status::optimal;
                break;
            }
            const int leave = head_[static_cast<std::size_t>(r)];
            const double xl = x_[static_cast<std::size_t>(leave)];
            const bool to_lower = xl < lo_[static_cast<std::size_t>(leave)];
            const double target = to_lower ? lo_[static_cast<std::size_t>(leave)] : hi_[static_cast<std::size_t>(leave)];

            rho.setZero();
            rho[r] = 1.0;
            factor_.btran(rho);

            // Pivot row over nonbasic, non-fixed variables.
            touched.clear();
            for (int i = 0; i < m; ++i) {
                double ri = rho[i];
                if (ri == 0.0) continue;
                model_.for_row(i, [&](int j, double a) {
                    if (alpha_row[static_cast<std::size_t>(j)] == 0.0) touched.push_back(j);
                    alpha_row[static_cast<std::size_t>(j)] += ri * a;
                    if (alpha_row[static_cast<std::size_t>(j)] == 0.0) alpha_row[static_cast<std::size_t>(j)] = 1e-300;
                });
                int lj = n + i;
                alpha_row[static_cast<std::size_t>(lj)] = -ri;
                touched.push_back(lj);
            }

            const double s = to_lower ? -1.0 : 1.0;
            int enter = -1;
            if (!bland) {
                double theta_max = kInf;
                for (int j : touched) {
                    double a = alpha_row[static_cast<std::size_t>(j)];
                    if (!eligible(j, a, s)) continue;
                    double dj = signed_dual(j);
                    theta_max = std::min(theta_max, (std::max(dj, 0.0) + tol.dual) / std::abs(a));
                }
                double best_abs = 0.0;
                for (int j : touched) {
                    double a = alpha_row[static_cast<std::size_t>(j)];
                    if (!eligible(j, a, s)) continue;
                    double ratio = std::max(signed_dual(j), 0.0) / std::abs(a);
                    if (ratio <= theta_max && (std::abs(a) > best_abs || (std::abs(a) == best_abs && j < enter))) {
                        best_abs = std::abs(a);
                        enter = j;
                    }
                }
            } else {
                double best = kInf;
                for (int j : touched) {
                    double a = alpha_row[static_cast<std::size_t>(j)];
                    if (!eligible(j, a, s)) continue;
                    double ratio = std::max(signed_dual(j), 0.0) / std::abs(a);
                    if (ratio < best - 1e-12 * (1.0 + best) ||
                        (ratio <= best + 1e-12 * (1.0 + best) && j < enter)) {
                        if (ratio < best) best = ratio;
                        enter = j;
                    }
                }
            }
            if (enter < 0) {
                for (int j : touched) alpha_row[static_cast<std::size_t>(j)] = 0.0;
                if (factor_.updates() > 0 && retries < 3) {
                    ++retries;
                    if (!refactor()) {
                        res.status = Status::numerical_failure;
                        break;
                    }
                    recompute_duals();
                    make_dual_feasible();
                    recompute_primals();
                    continue;
                }
                res.status = Status::infeasible;
                break;
            }

            alpha_q.setZero();
            model_.for_column(enter, [&](int i, double a) { alpha_q[i] = a; });
            factor_.ftran(alpha_q);
            const double piv_row = alpha_row[static_cast<std::size_t>(enter)];
            const double piv_col = alpha_q[r];
            if (std::abs(piv_col - piv_row) > 1e-7 * (1.0 + std::abs(piv_col)) || std::abs(piv_col) < tol.pivot) {
                for (int j : touched) alpha_row[static_cast<std::size_t>(j)] = 0.0;
                if (retries++ > 5) {
                    res.status = Status::numerical_failure;
                    break;
                }
                if (!refactor()) {
                    res.status = Status::numerical_failure;
                    break;
                }
                recompute_duals();
                make_dual_feasible();
                recompute_primals();
                continue;
            }
            retries = 0;

            tau = rho;
            factor_.ftran(tau);

            // Dual update.
            const double theta_d = d_[static_cast<std::size_t>(enter)] / piv_col;
            for (int j : touched) {
                if (state_[static_cast<std::size_t>(j)] != kBasic) d_[static_cast<std::size_t>(j)] -= theta_d * alpha_row[static_cast<std::size_t>(j)];
                alpha_row[static_cast<std::size_t>(j)] = 0.0;
            }
            d_[static_cast<std::size_t>(enter)] = 0.0;
            d_[static_cast<std::size_t>(leave)] = -theta_d;

            // Primal update.
            const double delta = (xl - target) / piv_col;
            for (int i = 0; i < m; ++i) {
                double a = alpha_q[i];
                if (a != 0.0) x_[static_cast<std::size_t>(head_[static_cast<std::size_t>(i)])] -= delta * a;
            }
            x_[static_cast<std::size_t>(enter)] += delta;
            x_[static_cast<std::size_t>(leave)] = target;

            // Dual steepest-edge weights.
            const double wr = std::max(rho.squaredNorm(), 1e-12);
            for (int i = 0; i < m; ++i) {
                if (i == r) continue;
                double a = alpha_q[i];
                if (a == 0.0) continue;
                double ratio = a / piv_col;
                double w = dse_[static_cast<std::size_t>(i)] - 2.0 * ratio * tau[i] + ratio * ratio * wr;
                dse_[static_cast<std::size_t>(i)] = std::max(w, std::max(ratio * ratio, 1e-8));
            }
            dse_[static_cast<std::size_t>(r)] = std::max(wr / (piv_col * piv_col), 1e-8);

            state_[static_cast<std::size_t>(leave)] = to_lower ? kAtLower : kAtUpper;
            state_[static_cast<std::size_t>(enter)] = kBasic;
            head_[static_cast<std::size_t>(r)] = enter;
            factor_.update(r, alpha_q);
            ++iter;

            if (factor_.updates() >= 80) {
                if (!refactor()) {
                    res.status = Status::numerical_failure;
                    break;
                }
                recompute_duals();
                make_dual_feasible();
                recompute_primals();
            }

            // Stall detection on the dual objective.
            double obj = objective();
            if (obj > last_obj + 1e-11 * (1.0 + std::abs(obj))) {
                last_obj = obj;
                stall = 0;
            } else if (++stall > 400 && !bland) {
                bland = true;
            }
        }

        res.iterations = iter;
        if (res.status == Status::optimal) {
            for (int j = 0; j < n; ++j) {
                double v = x_[static_cast<std::size_t>(j)];
                if ((model_.artificial_upper(j) && v >= hi_[static_cast<std::size_t>(j)] - 1e-6 * model_.tolerances().artificial_bound) ||
                    (model_.artificial_lower(j) && v <= lo_[static_cast<std::size_t>(j)] + 1e-6 * model_.tolerances().artificial_bound)) {
                    res.status = Status::unbounded;
                    break;
                }
            }
        }
        res.x.assign(x_.begin(), x_.begin() + n);
        res.objective = 0.0;
        for (int j = 0; j < n; ++j) res.objective += model_.cost(j) * x_[static_cast<std::size_t>(j)];
        res.basis.head = head_;
        res.basis.state = state_;
        return res;
    }

private:
    void setup_bounds(const std::vector<double>* lower, const std::vector<double>* upper) {
        lo_ = model_.lower();
        hi_ = model_.upper();
        const double big = model_.tolerances().artificial_bound;
        const int n = model_.cols();
        if (lower)
            for (int j = 0; j < n; ++j) {
                double v = (*lower)[static_cast<std::size_t>(j)];
                lo_[static_cast<std::size_t>(j)] = v == -kInf ? -big : v;
            }
        if (upper)
            for (int j = 0; j < n; ++j) {
                double v = (*upper)[static_cast<std::size_t>(j)];
                hi_[static_cast<std::size_t>(j)] = v == kInf ? big : v;
            }
    }

    void slack_basis() {
        const int n = model_.cols(), m = model_.rows();
        head_.resize(static_cast<std::size_t>(m));
        state_.assign(static_cast<std::size_t>(n + m), kAtLower);
        for (int i = 0; i < m; ++i) {
            head_[static_cast<std::size_t>(i)] = n + i;
            state_[static_cast<std::size_t>(n + i)] = kBasic;
        }
        for (int j = 0; j < n; ++j) state_[static_cast<std::size_t>(j)] = model_.cost(j) >= 0.0 ? kAtLower : kAtUpper;
    }

    bool refactor() {
        const int m = model_.rows();
        std::vector<int> ap, ai;
        std::vector<double> ax;
        factor_.recycle(ap, ai, ax);
        ap.assign(1, 0);
        ai.clear();
        ax.clear();
        for (int k = 0; k < m; ++k) {
            model_.for_column(head_[static_cast<std::size_t>(k)], [&](int i, double a) {
                ai.push_back(i);
                ax.push_back(a);
            });
            ap.push_back(static_cast<int>(ai.size()));
        }
        return factor_.factorize(m, std::move(ap), std::move(ai), std::move(ax));
    }

    [[nodiscard]] bool fixed(int j) const { return hi_[static_cast<std::size_t>(j)] - lo_[static_cast<std::size_t>(j)] <= 0.0; }

    [[nodiscard]] bool eligible(int j, double a, double s) const {
        auto st = state_[static_cast<std::size_t>(j)];
        if (st == kBasic || fixed(j)) return false;
        const double pt = model_.tolerances().pivot;
        return st == kAtLower ? s * a > pt : s * a < -pt;
    }

    // Reduced cost oriented so that dual feasibility means >= 0.
    [[nodiscard]] double signed_dual(int j) const {
        double dj = d_[static_cast<std::size_t>(j)];
        return state_[static_cast<std::size_t>(j)] == kAtUpper ? -dj : dj;
    }

    void recompute_duals() {
        const int n = model_.cols(), m = model_.rows();
        Vector y(m);
        for (int i = 0; i < m; ++i) y[i] = model_.cost(head_[static_cast<std::size_t>(i)]);
        factor_.btran(y);
        for (int j = 0; j < n + m; ++j) {
            if (state_[static_cast<std::size_t>(j)] == kBasic) {
                d_[static_cast<std::size_t>(j)] = 0.0;
                continue;
            }
            double dj = model_.cost(j);
            model_.for_column(j, [&](int i, double a) { dj -= y[i] * a; });
            d_[static_cast<std::size_t>(j)] = dj;
        }
    }

    void make_dual_feasible() {
        const int total = model_.cols() + model_.rows();
        const double tol = model_.tolerances().dual;
        for (int j = 0; j < total; ++j) {
            auto& st = state_[static_cast<std::size_t>(j)];
            if (st == kBasic) continue;
            if (fixed(j)) {
                st = kAtLower;
                continue;
            }
            double dj = d_[static_cast<std::size_t>(j)];
            if (st == kAtLower && dj < -tol) st = kAtUpper;
            else if (st == kAtUpper && dj > tol) st = kAtLower;
        }
    }

    void recompute_primals() {
        const int n = model_.cols(), m = model_.rows();
        Vector rhs = Vector::Zero(m);
        for (int j = 0; j < n + m; ++j) {
            auto st = state_[static_cast<std::size_t>(j)];
            if (st == kBasic) continue;
            double v = st == kAtLower ? lo_[static_cast<std::size_t>(j)] : hi_[static_cast<std::size_t>(j)];
            x_[static_cast<std::size_t>(j)] = v;
            if (v != 0.0) model_.for_column(j, [&](int i, double a) { rhs[i] -= a * v; });
        }
        factor_.ftran(rhs);
        for (int i = 0; i < m; ++i) x_[static_cast<std::size_t>(head_[static_cast<std::size_t>(i)])] = rhs[i];
    }

    int choose_leaving(bool bland) const {
        const int m = model_.rows();
        const double tol = model_.tolerances().primal;
        int best = -1;
        double best_score = 0.0;
        int best_var = std::numeric_limits<int>::max();
        for (int i = 0; i < m; ++i) {
            int j = head_[static_cast<std::size_t>(i)];
            double v = x_[static_cast<std::size_t>(j)];
            double lo = lo_[static_cast<std::size_t>(j)], hi = hi_[static_cast<std::size_t>(j)];
            double infeas = 0.0;
            if (v < lo - tol * (1.0 + std::abs(lo))) infeas = lo - v;
            else if (v > hi + tol * (1.0 + std::abs(hi))) infeas = v - hi;
            if (infeas <= 0.0) continue;
            if (bland) {
                if (j < best_var) {
                    best_var = j;
                    best = i;
                }
            } else {
                double score = infeas * infeas / dse_[static_cast<std::size_t>(i)];
                if (score > best_score) {
                    best_score = score;
                    best = i;
                }
            }
        }
        return best;
    }

    [[nodiscard]] double objective() const {
        double s = 0.0;
        for (int j = 0; j < model_.cols(); ++j) s += model_.cost(j) * x_[static_cast<std::size_t>(j)];
        return s;
    }

    const Model& model_;
    std::vector<double> lo_, hi_;
    std::vector<int> head_;
    std::vector<std::int8_t> state_;
    std::vector<double> x_, d_, dse_;
    BasisFactor factor_;
};

}  // namespace costres::lp
