#pragma once

// LP and MILP solving for ProblemInstance: dual simplex relaxations, best-bound branch and
// bound over the binaries, and an enumeration oracle for small instances.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <string>
#include <vector>

#include "costres/error.hpp"
#include "costres/instance.hpp"
#include "costres/presolve.hpp"
#include "costres/simplex.hpp"

namespace costres {

enum class SolveStatus { optimal, infeasible, unbounded, gap_limit, numerical_failure };

inline std::string_view to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unbounded: return "unbounded";
        case SolveStatus::gap_limit: return "gap_limit";
        case SolveStatus::numerical_failure: return "numerical_failure";
    }
    return "?";
}

struct Solution {
    SolveStatus status = SolveStatus::numerical_failure;
    double objective = 0.0;       // includes the instance's objective offset
    std::vector<double> values;   // indexed like instance.variables()
    double bound = -kInf;         // best proven lower bound
    long nodes = 0;
    long lp_iterations = 0;
    std::string diagnostics;
    lp::Basis root_basis;  // optimal basis of the root relaxation, without presolve only

    [[nodiscard]] bool ok() const { return status == SolveStatus::optimal; }
    [[nodiscard]] double value(const ProblemInstance& inst, const std::string& name) const {
        return values.at(static_cast<std::size_t>(inst.index_of(name)));
    }
};

struct MilpOptions {
    double abs_gap = 1e-6;
    double integrality = 1e-7;
    long node_limit = 50000;
    int heuristic_every = 10;
    bool presolve = true;
    /// Starting basis for the root relaxation; ignored unless presolve is off and the
    /// basis matches the instance dimensions.
    const lp::Basis* root_basis = nullptr;
};

namespace detail {

inline SolveStatus map_status(lp::Status s) {
    switch (s) {
        case lp::Status::optimal: return SolveStatus::optimal;
        case lp::Status::infeasible: return SolveStatus::infeasible;
        case lp::Status::unbounded: return SolveStatus::unbounded;
        default: return SolveStatus::numerical_failure;
    }
}

inline void bounds_of(const ProblemInstance& inst, std::vector<double>& lo, std::vector<double>& hi) {
    const auto& vars = inst.variables();
    lo.resize(vars.size());
    hi.resize(vars.size());
    for (std::size_t j = 0; j < vars.size(); ++j) {
        lo[j] = vars[j].lower;
        hi[j] = vars[j].upper;
    }
}

/// Snaps values sitting within tolerance of a bound onto it and rounds binaries.
inline void clean_values(const ProblemInstance& inst, std::vector<double>& x, bool round_binaries = true) {
    const auto& vars = inst.variables();
    auto near = [](double v, double b) { return std::isfinite(b) && std::abs(v - b) <= 1e-11 * (1.0 + std::abs(b)); };
    for (std::size_t j = 0; j < vars.size(); ++j) {
        double& v = x[j];
        if (round_binaries && vars[j].is_binary) {
            v = v < 0.5 ? 0.0 : 1.0;
            v = std::clamp(v, vars[j].lower, vars[j].upper);
            continue;
        }
        if (near(v, vars[j].lower)) v = vars[j].lower;
        if (near(v, vars[j].upper)) v = vars[j].upper;
        if (v == 0.0) v = 0.0;  // drop negative zero
    }
}

inline Solution solve_lp_direct(const ProblemInstance& inst) {
    lp::Model model(inst);
    lp::DualSimplex ds(model);
    auto r = ds.solve();
    Solution s;
    s.status = detail::map_status(r.status);
    s.lp_iterations = r.iterations;
    if (s.status == SolveStatus::optimal) {
        s.values = std::move(r.x);
        detail::clean_values(inst, s.values, false);
        s.objective = inst.evaluate_objective(s.values);
        s.bound = s.objective;
    } else if (s.status == SolveStatus::numerical_failure) {
        s.diagnostics = r.status == lp::Status::iteration_limit ? "simplex iteration limit reached"
                                                                : "basis factorization failed";
    }
    return s;
}

class BranchAndBound {
public:
    BranchAndBound(const ProblemInstance& inst, MilpOptions opt)
        : inst_(inst), opt_(opt), model_(inst), simplex_(model_) {
        bounds_of(inst, lo0_, hi0_);
        for (std::size_t j = 0; j < inst.variables().size(); ++j)
            if (inst.variables()[j].is_binary) binaries_.push_back(static_cast<int>(j));
    }

    Solution run() {
        Solution out;
        Node root;
        root.seq = seq_++;
        const lp::Basis* warm = nullptr;
        if (opt_.root_basis && !opt_.presolve) warm = opt_.root_basis;
        auto r = solve_node(root.fix, warm);
        if (r.status != lp::Status::optimal) {
            out.status = map_status(r.status);
            if (out.status == SolveStatus::numerical_failure) out.diagnostics = "root relaxation failed";
            out.lp_iterations = iterations_;
            return out;
        }
        root.bound = r.objective;
        root.basis = r.basis;
        if (!opt_.presolve) out.root_basis = r.basis;
        root.x = std::move(r.x);
        rounding_heuristics(root);
        open_.push(std::move(root));

        long nodes = 0;
        bool failed = false;
        while (!open_.empty()) {
            Node node = open_.top();
            open_.pop();
            if (!improves(node.bound)) continue;
            if (nodes >= opt_.node_limit) {
                open_.push(std::move(node));
                break;
            }
            ++nodes;
            if (nodes > 1 && opt_.heuristic_every > 0 && nodes % opt_.heuristic_every == 0) rounding_heuristics(node);

            int branch = most_fractional(node.x);
            if (branch < 0) {
                try_incumbent(node.fix, node.x, &node.basis);
                continue;
            }
            for (double side : {0.0, 1.0}) {
                Node child;
                child.fix = node.fix;
                child.fix.push_back({branch, side});
                auto cr = solve_node(child.fix, &node.basis);
                if (cr.status == lp::Status::infeasible) continue;
                if (cr.status != lp::Status::optimal) {
                    failed = true;
                    continue;
                }
                child.bound = std::max(cr.objective, node.bound);
                if (!improves(child.bound)) continue;
                child.basis = std::move(cr.basis);
                child.x = std::move(cr.x);
                child.seq = seq_++;
                open_.push(std::move(child));
            }
        }

        out.nodes = nodes;
        out.lp_iterations = iterations_;
        double bound = has_incumbent_ ? incumbent_obj_ : kInf;
        while (!open_.empty()) {
            bound = std::min(bound, open_.top().bound);
            open_.pop();
        }
        if (!has_incumbent_) {
            out.status = failed ? SolveStatus::numerical_failure
                                : (nodes >= opt_.node_limit ? SolveStatus::gap_limit : SolveStatus::infeasible);
            if (failed) out.diagnostics = "node relaxations failed and no incumbent was found";
            out.bound = bound + inst_.objective_offset();
            return out;
        }
        out.values = incumbent_;
        out.objective = inst_.evaluate_objective(out.values);
        out.bound = std::min(bound + inst_.objective_offset(), out.objective);
        bool closed = out.objective - out.bound <= gap();
        out.status = closed ? SolveStatus::optimal : SolveStatus::gap_limit;
        if (failed) {
            // A lost subtree may hide a better solution, so nothing is proven.
            out.status = SolveStatus::numerical_failure;
            out.diagnostics = "some node relaxations failed numerically";
        }
        return out;
    }

private:
    struct Fix {
        int var;
        double value;
    };
    struct Node {
        std::vector<Fix> fix;
        double bound = -kInf;
        long seq = 0;
        lp::Basis basis;
        std::vector<double> x;
    };
    struct Worse {
        bool operator()(const Node& a, const Node& b) const {
            if (a.bound != b.bound) return a.bound > b.bound;
            return a.seq > b.seq;
        }
    };

    [[nodiscard]] double gap() const {
        return opt_.abs_gap + (has_incumbent_ ? 1e-12 * std::abs(incumbent_obj_) : 0.0);
    }

    [[nodiscard]] bool improves(double bound) const {
        return !has_incumbent_ || bound < incumbent_obj_ - gap();
    }

    lp::Result solve_node(const std::vector<Fix>& fix, const lp::Basis* warm) {
        lo_ = lo0_;
        hi_ = hi0_;
        for (const auto& f : fix) lo_[static_cast<std::size_t>(f.var)] = hi_[static_cast<std::size_t>(f.var)] = f.value;
        auto r = simplex_.solve(&lo_, &hi_, warm);
        if (r.status == lp::Status::numerical_failure || r.status == lp::Status::iteration_limit) {
            // A cold start occasionally succeeds where a stale basis does not.
            if (warm) r = simplex_.solve(&lo_, &hi_, nullptr);
        }
        iterations_ += r.iterations;
        return r;
    }

    int most_fractional(const std::vector<double>& x) const {
        int best = -1;
        double best_frac = opt_.integrality;
        for (int j : binaries_) {
            double v = x[static_cast<std::size_t>(j)];
            double frac = std::min(v - std::floor(v), std::ceil(v) - v);
            if (frac > best_frac) {
                best_frac = frac;
                best = j;
            }
        }
        return best;
    }

    // Fixes every binary to its rounded value and solves the remaining LP.
    void try_incumbent(const std::vector<Fix>& base, const std::vector<double>& x, const lp::Basis* warm) {
        std::vector<Fix> fix = base;
        for (int j : binaries_) fix.push_back({j, x[static_cast<std::size_t>(j)] < 0.5 ? 0.0 : 1.0});
        try_fixing(fix, warm);
    }

    void try_fixing(const std::vector<Fix>& fix, const lp::Basis* warm) {
        auto r = solve_node(fix, warm);
        if (r.status != lp::Status::optimal) return;
        std::vector<double> v = std::move(r.x);
        for (const auto& f : fix) v[static_cast<std::size_t>(f.var)] = f.value;
        clean_values(inst_, v);
        if (inst_.max_violation(v) > 1e-7) return;
        double obj = inst_.evaluate_objective(v) - inst_.objective_offset();
        if (!has_incumbent_ || obj < incumbent_obj_) {
            has_incumbent_ = true;
            incumbent_obj_ = obj;
            incumbent_ = std::move(v);
        }
    }

    void rounding_heuristics(const Node& node) {
        // Rounding every fractional binary up tends to stay feasible in commitment models.
        std::vector<Fix> up = node.fix;
        for (int j : binaries_) {
            double v = node.x[static_cast<std::size_t>(j)];
            up.push_back({j, v > opt_.integrality ? 1.0 : 0.0});
        }
        try_fixing(up, &node.basis);
        if (has_incumbent_ && incumbent_obj_ - node.bound <= gap()) return;
        try_incumbent(node.fix, node.x, &node.basis);
    }

    const ProblemInstance& inst_;
    MilpOptions opt_;
    lp::Model model_;
    lp::DualSimplex simplex_;
    std::vector<double> lo0_, hi0_, lo_, hi_;
    std::vector<int> binaries_;
    std::priority_queue<Node, std::vector<Node>, Worse> open_;
    long seq_ = 0;
    long iterations_ = 0;
    bool has_incumbent_ = false;
    double incumbent_obj_ = kInf;
    std::vector<double> incumbent_;
};

// Runs `solve` on the presolved instance and maps the answer back.
template <class F>
Solution with_presolve(const ProblemInstance& inst, F&& solve) {
    auto pre = presolve(inst);
    if (pre.infeasible) {
        Solution s;
        s.status = SolveStatus::infeasible;
        return s;
    }
    Solution s = solve(pre.reduced);
    if (s.values.empty() && s.status != SolveStatus::optimal && s.status != SolveStatus::gap_limit) return s;
    double shift = s.bound;
    s.values = pre.expand(s.values);
    clean_values(inst, s.values, false);
    s.objective = inst.evaluate_objective(s.values);
    s.bound = std::min(shift, s.objective);
    return s;
}

}  // namespace detail

/// Solves the LP relaxation (binaries treated as [0, 1]).
inline Solution solve_lp(const ProblemInstance& inst) {
    return detail::with_presolve(inst.relaxed(), [](const ProblemInstance& r) { return detail::solve_lp_direct(r); });
}

/// Best-bound branch and bound. Branches on the most fractional binary (lowest index on
/// ties), explores the down branch first and stops once the incumbent is within
/// `abs_gap` of the best open bound.
inline Solution solve_milp(const ProblemInstance& inst, const MilpOptions& opt) {
    auto run = [&](const ProblemInstance& r) { return detail::BranchAndBound(r, opt).run(); };
    if (!opt.presolve) return run(inst);
    return detail::with_presolve(inst, run);
}

inline Solution solve_milp(const ProblemInstance& inst, double abs_gap = 1e-6) {
    MilpOptions opt;
    opt.abs_gap = abs_gap;
    return solve_milp(inst, opt);
}

inline constexpr std::size_t kBruteForceMaxBinaries = 20;

/// Enumerates every binary assignment and solves the residual LP from scratch for each.
/// Returns the first assignment (in counting order) with the strictly lowest objective.
inline Solution brute_force(const ProblemInstance& inst) {
    std::vector<int> bins;
    for (std::size_t j = 0; j < inst.variables().size(); ++j)
        if (inst.variables()[j].is_binary) bins.push_back(static_cast<int>(j));
    if (bins.size() > kBruteForceMaxBinaries)
        throw SolverError("brute_force refuses " + std::to_string(bins.size()) + " binaries (cap " +
                          std::to_string(kBruteForceMaxBinaries) + ")");
    Solution best;
    best.status = SolveStatus::infeasible;
    bool unbounded = false;
    const std::uint64_t count = std::uint64_t{1} << bins.size();
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        ProblemInstance fixed = inst;
        bool skip = false;
        for (std::size_t k = 0; k < bins.size(); ++k) {
            double v = (mask >> k) & 1U ? 1.0 : 0.0;
            const auto& var = inst.variables()[static_cast<std::size_t>(bins[k])];
            if (v < var.lower || v > var.upper) {
                skip = true;
                break;
            }
            fixed.set_bounds(bins[k], v, v);
        }
        if (skip) continue;
        auto s = solve_lp(fixed);
        if (s.status == SolveStatus::unbounded) unbounded = true;
        if (s.status == SolveStatus::numerical_failure) {
            best.status = SolveStatus::numerical_failure;
            best.diagnostics = "residual LP failed for assignment " + std::to_string(mask);
            return best;
        }
        if (s.status != SolveStatus::optimal) continue;
        if (best.status != SolveStatus::optimal || s.objective < best.objective) {
            for (int j : bins) s.values[static_cast<std::size_t>(j)] = fixed.variables()[static_cast<std::size_t>(j)].lower;
            best.status = SolveStatus::optimal;
            best.objective = s.objective;
            best.values = std::move(s.values);
        }
    }
    if (unbounded) {
        best = Solution{};
        best.status = SolveStatus::unbounded;
        return best;
    }
    best.bound = best.status == SolveStatus::optimal ? best.objective : kInf;
    return best;
}

}  // namespace costres
