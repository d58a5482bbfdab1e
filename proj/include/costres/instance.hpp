#pragma once

// Explicit sparse mixed-integer linear problems (minimization) and their LP-text export.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "costres/error.hpp"

namespace costres {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense : std::uint8_t { le, eq, ge };

struct Variable {
    std::string name;
    double lower = 0.0;
    double upper = kInf;
    bool is_binary = false;
    double objective = 0.0;
};

struct Term {
    int var = 0;
    double coef = 0.0;
};

struct Constraint {
    std::string name;
    std::vector<Term> terms;
    Sense sense = Sense::le;
    double rhs = 0.0;
};

/// min  objective_offset + sum_j objective_j x_j  subject to rows and bounds.
class ProblemInstance {
public:
    int add_variable(std::string name, double lower, double upper, double objective = 0.0,
                     bool is_binary = false) {
        if (is_binary) {
            lower = std::max(lower, 0.0);
            upper = std::min(upper, 1.0);
        }
        if (!(lower <= upper))
            throw InvariantError("variable '" + name + "' has lower bound above upper bound");
        auto idx = static_cast<int>(variables_.size());
        if (!index_.emplace(name, idx).second)
            throw InvariantError("duplicate variable name '" + name + "'");
        variables_.push_back({std::move(name), lower, upper, is_binary, objective});
        return idx;
    }

    int add_binary(std::string name, double objective = 0.0) {
        return add_variable(std::move(name), 0.0, 1.0, objective, true);
    }

    int add_constraint(std::string name, std::vector<Term> terms, Sense sense, double rhs) {
        for (const auto& t : terms)
            if (t.var < 0 || t.var >= static_cast<int>(variables_.size()))
                throw InvariantError("constraint '" + name + "' references unknown variable");
        auto idx = static_cast<int>(constraints_.size());
        constraints_.push_back({std::move(name), std::move(terms), sense, rhs});
        return idx;
    }

    void add_objective_offset(double v) { offset_ += v; }
    [[nodiscard]] double objective_offset() const { return offset_; }

    [[nodiscard]] const std::vector<Variable>& variables() const { return variables_; }
    [[nodiscard]] const std::vector<Constraint>& constraints() const { return constraints_; }
    [[nodiscard]] std::vector<Variable>& mutable_variables() { return variables_; }

    [[nodiscard]] int find(const std::string& name) const {
        auto it = index_.find(name);
        return it == index_.end() ? -1 : it->second;
    }
    [[nodiscard]] int index_of(const std::string& name) const {
        int i = find(name);
        if (i < 0) throw InvariantError("no variable named '" + name + "'");
        return i;
    }

    [[nodiscard]] std::size_t binary_count() const {
        std::size_t n = 0;
        for (const auto& v : variables_) n += v.is_binary ? 1 : 0;
        return n;
    }

    void set_bounds(int var, double lower, double upper) {
        auto& v = variables_.at(static_cast<std::size_t>(var));
        if (!(lower <= upper))
            throw InvariantError("variable '" + v.name + "' has lower bound above upper bound");
        v.lower = lower;
        v.upper = upper;
    }

    /// Same instance with every binary treated as continuous on [0, 1].
    [[nodiscard]] ProblemInstance relaxed() const {
        ProblemInstance r = *this;
        for (auto& v : r.variables_) v.is_binary = false;
        return r;
    }

    [[nodiscard]] double evaluate_objective(const std::vector<double>& x) const {
        double s = offset_;
        for (std::size_t j = 0; j < variables_.size(); ++j) s += variables_[j].objective * x[j];
        return s;
    }

    /// Largest bound, row or integrality violation of a point.
    [[nodiscard]] double max_violation(const std::vector<double>& x) const {
        double worst = 0.0;
        for (std::size_t j = 0; j < variables_.size(); ++j) {
            const auto& v = variables_[j];
            worst = std::max({worst, v.lower - x[j], x[j] - v.upper});
            if (v.is_binary) worst = std::max(worst, std::min(std::abs(x[j]), std::abs(x[j] - 1.0)));
        }
        for (const auto& c : constraints_) {
            double a = 0.0;
            for (const auto& t : c.terms) a += t.coef * x[static_cast<std::size_t>(t.var)];
            if (c.sense != Sense::ge) worst = std::max(worst, a - c.rhs);
            if (c.sense != Sense::le) worst = std::max(worst, c.rhs - a);
        }
        return worst;
    }

private:
    std::vector<Variable> variables_;
    std::vector<Constraint> constraints_;
    std::unordered_map<std::string, int> index_;
    double offset_ = 0.0;
};

namespace detail {

// LP-format names may not contain brackets: u[G1][3] -> u(G1,3).
inline std::string lp_name(const std::string& name) {
    std::string out;
    out.reserve(name.size());
    for (std::size_t i = 0; i < name.size(); ++i) {
        char c = name[i];
        if (c == ']' && i + 1 < name.size() && name[i + 1] == '[') {
            out.push_back(',');
            ++i;
        } else if (c == '[') {
            out.push_back('(');
        } else if (c == ']') {
            out.push_back(')');
        } else {
            out.push_back(c);
        }
    }
    return out;
}

inline std::string lp_number(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

inline void lp_terms(std::ostream& out, const ProblemInstance& inst,
                     const std::vector<std::pair<int, double>>& terms) {
    bool first = true;
    for (const auto& [var, coef] : terms) {
        if (coef == 0.0) continue;
        out << ' ' << (coef < 0 ? '-' : '+') << ' ' << lp_number(std::abs(coef)) << ' '
            << lp_name(inst.variables()[static_cast<std::size_t>(var)].name);
        first = false;
    }
    if (first) out << " 0 " << lp_name(inst.variables().front().name);
}

}  // namespace detail

/// Writes the instance in CPLEX-style LP text. Layout (one item per line):
///   "\ objective offset: <v>"      offset kept as a comment
///   "Minimize" / " obj: <terms>"
///   "Subject To" / " <row>: <terms> <= | = | >= <rhs>"
///   "Bounds" / " <lo> <= <var> <= <hi>"  ("-inf"/"+inf" for infinite sides)
///   "Binary" / " <var>"                   one per line
///   "End"
/// Terms print as " + c name" or " - c name" with 17 significant digits.
inline void write_lp(std::ostream& out, const ProblemInstance& inst) {
    const auto& vars = inst.variables();
    out << "\\ objective offset: " << detail::lp_number(inst.objective_offset()) << '\n';
    out << "Minimize\n obj:";
    std::vector<std::pair<int, double>> obj;
    for (std::size_t j = 0; j < vars.size(); ++j)
        if (vars[j].objective != 0.0) obj.emplace_back(static_cast<int>(j), vars[j].objective);
    if (vars.empty()) {
        out << " 0";
    } else {
        detail::lp_terms(out, inst, obj);
    }
    out << "\nSubject To\n";
    for (const auto& c : inst.constraints()) {
        out << ' ' << detail::lp_name(c.name) << ':';
        std::vector<std::pair<int, double>> terms;
        for (const auto& t : c.terms) terms.emplace_back(t.var, t.coef);
        detail::lp_terms(out, inst, terms);
        out << (c.sense == Sense::le ? " <= " : c.sense == Sense::eq ? " = " : " >= ")
            << detail::lp_number(c.rhs) << '\n';
    }
    out << "Bounds\n";
    for (const auto& v : vars) {
        if (v.is_binary && v.lower == 0.0 && v.upper == 1.0) continue;
        auto side = [](double b) {
            if (b == kInf) return std::string("+inf");
            if (b == -kInf) return std::string("-inf");
            return detail::lp_number(b);
        };
        out << ' ' << side(v.lower) << " <= " << detail::lp_name(v.name) << " <= " << side(v.upper)
            << '\n';
    }
    bool any_binary = false;
    for (const auto& v : vars) any_binary |= v.is_binary;
    if (any_binary) {
        out << "Binary\n";
        for (const auto& v : vars)
            if (v.is_binary) out << ' ' << detail::lp_name(v.name) << '\n';
    }
    out << "End\n";
}

}  // namespace costres
