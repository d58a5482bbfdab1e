#pragma once

// Presolve for ProblemInstance: fixes columns whose bounds coincide, turns singleton rows
// into bounds and drops rows left without free columns. The reduced instance keeps
// variable names and carries the fixed part of the objective in its offset.

#include <algorithm>
#include <cmath>
#include <vector>

#include "costres/instance.hpp"

namespace costres {

struct Presolved {
    bool infeasible = false;
    ProblemInstance reduced;
    std::vector<int> column;      // original index -> reduced index, -1 when fixed
    std::vector<double> fixed;    // value of fixed originals

    /// Expands a reduced solution to the original variable order.
    [[nodiscard]] std::vector<double> expand(const std::vector<double>& x) const {
        std::vector<double> out(column.size());
        for (std::size_t j = 0; j < column.size(); ++j)
            out[j] = column[j] < 0 ? fixed[j] : x[static_cast<std::size_t>(column[j])];
        return out;
    }
};

inline Presolved presolve(const ProblemInstance& inst) {
    constexpr double kFeas = 1e-9;
    const auto& vars = inst.variables();
    const auto& rows = inst.constraints();
    const std::size_t n = vars.size();
    std::vector<double> lo(n), hi(n);
    for (std::size_t j = 0; j < n; ++j) {
        lo[j] = vars[j].lower;
        hi[j] = vars[j].upper;
    }
    auto is_fixed = [&](std::size_t j) { return hi[j] - lo[j] <= 0.0; };
    std::vector<char> alive(rows.size(), 1);
    Presolved out;

    auto tighten = [&](std::size_t j, double new_lo, double new_hi) {
        if (vars[j].is_binary) {
            new_lo = std::ceil(new_lo - kFeas);
            new_hi = std::floor(new_hi + kFeas);
        }
        bool changed = false;
        if (new_lo > lo[j]) {
            lo[j] = new_lo;
            changed = true;
        }
        if (new_hi < hi[j]) {
            hi[j] = new_hi;
            changed = true;
        }
        if (lo[j] > hi[j]) {
            if (lo[j] - hi[j] > kFeas * (1.0 + std::abs(lo[j]))) {
                out.infeasible = true;
            } else {
                lo[j] = hi[j] = vars[j].is_binary ? std::round(lo[j]) : 0.5 * (lo[j] + hi[j]);
            }
        }
        return changed;
    };

    for (int pass = 0; pass < 20 && !out.infeasible; ++pass) {
        bool changed = false;
        for (std::size_t i = 0; i < rows.size() && !out.infeasible; ++i) {
            if (!alive[i]) continue;
            const auto& r = rows[i];
            double rhs = r.rhs;
            int free_var = -1;
            double free_coef = 0.0;
            int free_count = 0;
            for (const auto& t : r.terms) {
                if (t.coef == 0.0) continue;
                auto j = static_cast<std::size_t>(t.var);
                if (is_fixed(j)) {
                    rhs -= t.coef * lo[j];
                } else if (t.var == free_var) {
                    free_coef += t.coef;
                } else {
                    ++free_count;
                    free_var = t.var;
                    free_coef = t.coef;
                }
            }
            if (free_count == 0 || (free_count == 1 && free_coef == 0.0)) {
                double slack = kFeas * (1.0 + std::abs(r.rhs));
                bool ok = (r.sense == Sense::ge || rhs >= -slack) && (r.sense == Sense::le || rhs <= slack);
                if (!ok) out.infeasible = true;
                alive[i] = 0;
                changed = true;
                continue;
            }
            if (free_count != 1) continue;
            auto j = static_cast<std::size_t>(free_var);
            double bound = rhs / free_coef;
            Sense s = r.sense;
            if (free_coef < 0.0 && s != Sense::eq) s = s == Sense::le ? Sense::ge : Sense::le;
            if (s == Sense::le) tighten(j, -kInf, bound);
            else if (s == Sense::ge) tighten(j, bound, kInf);
            else tighten(j, bound, bound);
            alive[i] = 0;
            changed = true;
        }
        if (!changed) break;
    }
    if (out.infeasible) return out;

    out.column.assign(n, -1);
    out.fixed.assign(n, 0.0);
    auto& red = out.reduced;
    double offset = inst.objective_offset();
    for (std::size_t j = 0; j < n; ++j) {
        if (is_fixed(j)) {
            out.fixed[j] = lo[j];
            offset += vars[j].objective * lo[j];
            continue;
        }
        out.column[j] = red.add_variable(vars[j].name, lo[j], hi[j], vars[j].objective, vars[j].is_binary);
    }
    red.add_objective_offset(offset);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!alive[i]) continue;
        const auto& r = rows[i];
        double rhs = r.rhs;
        std::vector<Term> terms;
        for (const auto& t : r.terms) {
            auto j = static_cast<std::size_t>(t.var);
            if (out.column[j] < 0) rhs -= t.coef * out.fixed[j];
            else if (t.coef != 0.0) terms.push_back({out.column[j], t.coef});
        }
        red.add_constraint(r.name, std::move(terms), r.sense, rhs);
    }
    return out;
}

}  // namespace costres
