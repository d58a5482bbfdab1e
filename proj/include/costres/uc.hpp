#pragma once

// Unit-commitment models on variable-length periods: the day-ahead commitment problem
// (deterministic or over equiprobable scenarios), the real-time dispatch that inherits
// day-ahead decisions, schedule extraction and cost accounting.
//
// Variables per unit g and non-empty period t (t is the partition period index):
//   u[g][t]  commitment (binary)          p[g][t]   output, MW
//   su[g][t] start-up cost, EUR           sd[g][t]  shut-down cost, EUR
//   v[g][t]  start indicator              w[g][t]   stop indicator   (only with min up/down)
// and per period pd[t] (served demand), sp[t] (surplus spilled). The stochastic model has
// pd[t][s] and sp[t][s] per scenario s. Shortfall is priced at C^LS,
// surplus at the fleet's spill cost. su/sd exist only for units with non-zero costs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "costres/error.hpp"
#include "costres/instance.hpp"
#include "costres/model.hpp"
#include "costres/partition.hpp"
#include "costres/solver.hpp"

namespace costres {

enum class Stage { da, rt };

inline std::string_view to_string(Stage s) { return s == Stage::da ? "DA" : "RT"; }

/// Contiguous RT interval range [first, last) covered by one partition period.
struct IndexRange {
    int first = 0;
    int last = 0;
    [[nodiscard]] int size() const { return last - first; }
    bool operator==(const IndexRange&) const = default;
};

/// One range per partition period (empty for zero-length periods).
inline std::vector<IndexRange> da_to_rt_index_map(const TimePartition& partition, int rt_step) {
    if (rt_step <= 0 || partition.grid_minutes() % rt_step != 0)
        throw ShapeError("partition grid of " + std::to_string(partition.grid_minutes()) +
                         " min is not a multiple of the " + std::to_string(rt_step) + "-min RT step");
    std::vector<IndexRange> out;
    int pos = 0;
    for (int len : partition.lengths()) {
        out.push_back({pos / rt_step, (pos + len) / rt_step});
        pos += len;
    }
    return out;
}

struct Schedule {
    Stage stage = Stage::da;
    TimePartition partition;           // DA partition, or the uniform RT grid
    std::vector<int> periods;          // partition period index of each column
    std::vector<double> hours;         // duration of each column
    std::vector<std::vector<std::uint8_t>> on;  // [unit][column]
    std::vector<std::vector<double>> power;     // MW
    std::vector<std::vector<double>> startup;   // EUR
    std::vector<std::vector<double>> shutdown;  // EUR
    std::vector<double> served;        // MW (scenario mean in stochastic models)
    std::vector<double> shed;          // MW (scenario mean in stochastic models)
    std::vector<double> spill;         // MW (scenario mean in stochastic models)
    double objective = 0.0;            // solver objective, EUR

    [[nodiscard]] std::size_t columns() const { return hours.size(); }
};

struct CostBreakdown {
    double start_stop = 0.0;
    double op_baseload = 0.0;
    double op_intermediate = 0.0;
    double op_peaking = 0.0;
    double shed = 0.0;  // shortfall and surplus penalties
    double total = 0.0;
};

/// Built model plus the variable index tables needed to read a solution back.
struct UcProblem {
    ProblemInstance instance;
    Stage stage = Stage::da;
    TimePartition partition;
    std::vector<int> periods;
    std::vector<double> hours;
    std::vector<std::vector<double>> demand;  // [scenario][column]
    bool stochastic = false;
    std::vector<std::vector<int>> u, p, su, sd;  // [unit][column], -1 if absent
    std::vector<std::vector<int>> pd;            // [scenario][column]
    std::vector<std::vector<int>> sp;            // [scenario][column]
};

namespace detail {

// Per-unit RT inheritance from the day-ahead stage.
struct Inherited {
    bool commit = false;
    bool power = false;
    std::vector<double> u;
    std::vector<double> p;
};

inline std::string idx(const std::string& base, const std::string& g, int t) {
    return base + "[" + g + "][" + std::to_string(t) + "]";
}

inline UcProblem build_uc(const Fleet& fleet, Stage stage, const TimePartition& partition,
                          const std::vector<int>& periods, const std::vector<double>& hours,
                          std::vector<std::vector<double>> demand, bool stochastic,
                          const std::vector<Inherited>* inherit) {
    fleet.validate();
    const std::size_t T = hours.size();
    const std::size_t G = fleet.units.size();
    const std::size_t S = demand.size();
    UcProblem pb;
    pb.stage = stage;
    pb.partition = partition;
    pb.periods = periods;
    pb.hours = hours;
    pb.stochastic = stochastic;
    pb.u.assign(G, std::vector<int>(T, -1));
    pb.p = pb.su = pb.sd = pb.u;
    auto& inst = pb.instance;

    // Period start times in hours, for minimum up/down windows.
    std::vector<double> start(T, 0.0);
    for (std::size_t t = 1; t < T; ++t) start[t] = start[t - 1] + hours[t - 1];

    for (std::size_t g = 0; g < G; ++g) {
        const auto& un = fleet.units[g];
        const Inherited* inh = inherit ? &(*inherit)[g] : nullptr;
        const bool fixed_u = inh && inh->commit;
        const bool fixed_p = inh && inh->power;
        const bool updown = !fixed_u && (un.min_up > 0.0 || un.min_down > 0.0);
        const double u0 = un.init_on ? 1.0 : 0.0;
        const double p0 = un.init_power;
        // Residual minimum time carried in from before the horizon.
        const double must_on = un.init_on ? std::max(0.0, un.min_up - un.init_hours_in_state) : 0.0;
        const double must_off = !un.init_on ? std::max(0.0, un.min_down - un.init_hours_in_state) : 0.0;

        std::vector<int> v(T, -1), w(T, -1);
        for (std::size_t t = 0; t < T; ++t) {
            const int lab = periods[t];
            double lo = 0.0, hi = 1.0;
            if (fixed_u) {
                lo = hi = inh->u[t];
            } else if (start[t] < must_on - 1e-9) {
                lo = 1.0;
            } else if (start[t] < must_off - 1e-9) {
                hi = 0.0;
            }
            pb.u[g][t] = inst.add_variable(idx("u", un.id, lab), lo, hi, 0.0, true);
            double plo = 0.0, phi = un.p_max;
            if (fixed_p) plo = phi = inh->p[t];
            pb.p[g][t] = inst.add_variable(idx("p", un.id, lab), plo, phi, un.marginal_cost * hours[t]);
            if (un.startup_cost > 0.0)
                pb.su[g][t] = inst.add_variable(idx("su", un.id, lab), 0.0, un.startup_cost, 1.0);
            if (un.shutdown_cost > 0.0)
                pb.sd[g][t] = inst.add_variable(idx("sd", un.id, lab), 0.0, un.shutdown_cost, 1.0);
            if (updown) {
                v[t] = inst.add_variable(idx("v", un.id, lab), 0.0, 1.0);
                w[t] = inst.add_variable(idx("w", un.id, lab), 0.0, 1.0);
            }
        }

        for (std::size_t t = 0; t < T; ++t) {
            const int lab = periods[t];
            const int ut = pb.u[g][t], pt = pb.p[g][t];
            const int uprev = t > 0 ? pb.u[g][t - 1] : -1;
            const int pprev = t > 0 ? pb.p[g][t - 1] : -1;
            if (!fixed_p) {
                inst.add_constraint(idx("pmax", un.id, lab), {{pt, 1.0}, {ut, -un.p_max}}, Sense::le, 0.0);
                if (un.p_min > 0.0)
                    inst.add_constraint(idx("pmin", un.id, lab), {{pt, 1.0}, {ut, -un.p_min}}, Sense::ge, 0.0);

                // Ramping over the duration of the later period, with start/stop allowances.
                const double ru = un.ramp_up * hours[t];
                const double rd = un.ramp_down * hours[t];
                const double su_lim = std::max(un.p_min, ru);
                const double sd_lim = std::max(un.p_min, rd);
                // A ramp rate covering the whole output range can never bind.
                if (ru >= un.p_max && rd >= un.p_max) {
                } else if (t == 0) {
                    // p_t - p0 <= ru*u0 + su_lim*(1-u0)
                    inst.add_constraint(idx("rup", un.id, lab), {{pt, 1.0}}, Sense::le,
                                        p0 + ru * u0 + su_lim * (1.0 - u0));
                    // p0 - p_t <= rd*u_t + sd_lim*(1-u_t)
                    inst.add_constraint(idx("rdn", un.id, lab), {{pt, -1.0}, {ut, sd_lim - rd}}, Sense::le,
                                        sd_lim - p0);
                } else {
                    inst.add_constraint(idx("rup", un.id, lab), {{pt, 1.0}, {pprev, -1.0}, {uprev, su_lim - ru}},
                                        Sense::le, su_lim);
                    inst.add_constraint(idx("rdn", un.id, lab), {{pprev, 1.0}, {pt, -1.0}, {ut, sd_lim - rd}},
                                        Sense::le, sd_lim);
                }
            }
            // su >= SC (u_t - u_{t-1}),  sd >= SDC (u_{t-1} - u_t)
            if (pb.su[g][t] >= 0) {
                const double c = un.startup_cost;
                if (t == 0)
                    inst.add_constraint(idx("sucost", un.id, lab), {{pb.su[g][t], 1.0}, {ut, -c}}, Sense::ge, -c * u0);
                else
                    inst.add_constraint(idx("sucost", un.id, lab), {{pb.su[g][t], 1.0}, {ut, -c}, {uprev, c}},
                                        Sense::ge, 0.0);
            }
            if (pb.sd[g][t] >= 0) {
                const double c = un.shutdown_cost;
                if (t == 0)
                    inst.add_constraint(idx("sdcost", un.id, lab), {{pb.sd[g][t], 1.0}, {ut, c}}, Sense::ge, c * u0);
                else
                    inst.add_constraint(idx("sdcost", un.id, lab), {{pb.sd[g][t], 1.0}, {ut, c}, {uprev, -c}},
                                        Sense::ge, 0.0);
            }
            if (updown) {
                // v_t - w_t = u_t - u_{t-1}
                if (t == 0)
                    inst.add_constraint(idx("trans", un.id, lab), {{v[t], 1.0}, {w[t], -1.0}, {ut, -1.0}}, Sense::eq, -u0);
                else
                    inst.add_constraint(idx("trans", un.id, lab), {{v[t], 1.0}, {w[t], -1.0}, {ut, -1.0}, {uprev, 1.0}},
                                        Sense::eq, 0.0);
                // A start in period s keeps the unit on while less than min_up hours have
                // elapsed between the start of s and the start of t.
                if (un.min_up > 0.0) {
                    std::vector<Term> terms{{ut, -1.0}};
                    for (std::size_t s = 0; s <= t; ++s)
                        if (start[t] - start[s] < un.min_up - 1e-9) terms.push_back({v[s], 1.0});
                    if (terms.size() > 1) inst.add_constraint(idx("minup", un.id, lab), terms, Sense::le, 0.0);
                }
                if (un.min_down > 0.0) {
                    std::vector<Term> terms{{ut, 1.0}};
                    for (std::size_t s = 0; s <= t; ++s)
                        if (start[t] - start[s] < un.min_down - 1e-9) terms.push_back({w[s], 1.0});
                    if (terms.size() > 1) inst.add_constraint(idx("mindn", un.id, lab), terms, Sense::le, 1.0);
                }
            }
        }
    }

    // Served demand, shedding priced as C^LS * hours * (demand - served).
    pb.pd.assign(S, std::vector<int>(T, -1));
    const double weight = 1.0 / static_cast<double>(S);
    for (std::size_t s = 0; s < S; ++s)
        for (std::size_t t = 0; t < T; ++t) {
            const double target = std::max(demand[s][t], 0.0);
            const double c = weight * fleet.shed_cost * hours[t];
            std::string name = stochastic ? "pd[" + std::to_string(periods[t]) + "][" + std::to_string(s) + "]"
                                          : "pd[" + std::to_string(periods[t]) + "]";
            pb.pd[s][t] = inst.add_variable(name, 0.0, target, -c);
            inst.add_objective_offset(c * target);
        }
    // Generation beyond served demand is spilled.
    pb.sp.assign(S, std::vector<int>(T, -1));
    for (std::size_t t = 0; t < T; ++t) {
        std::vector<Term> gen;
        for (std::size_t g = 0; g < G; ++g) gen.push_back({pb.p[g][t], 1.0});
        const std::string lab = std::to_string(periods[t]);
        for (std::size_t s = 0; s < S; ++s) {
            const std::string suffix = stochastic ? "[" + lab + "][" + std::to_string(s) + "]" : "[" + lab + "]";
            pb.sp[s][t] = inst.add_variable("sp" + suffix, 0.0, fleet.total_capacity(),
                                            weight * fleet.spill_cost * hours[t]);
            auto terms = gen;
            terms.push_back({pb.pd[s][t], -1.0});
            terms.push_back({pb.sp[s][t], -1.0});
            inst.add_constraint("bal" + suffix, terms, Sense::eq, 0.0);
        }
    }
    pb.demand = std::move(demand);
    return pb;
}

inline void active_columns(const TimePartition& partition, std::vector<int>& periods, std::vector<double>& hours) {
    periods.clear();
    hours.clear();
    for (std::size_t t = 0; t < partition.size(); ++t) {
        int len = partition.lengths()[t];
        if (len == 0) continue;
        periods.push_back(static_cast<int>(t));
        hours.push_back(len / 60.0);
    }
}

}  // namespace detail

/// Day-ahead UC on a partition; `demand` has one entry per non-empty period.
inline UcProblem build_da_uc(const Fleet& fleet, const TimePartition& partition, const std::vector<double>& demand) {
    std::vector<int> periods;
    std::vector<double> hours;
    detail::active_columns(partition, periods, hours);
    if (demand.size() != hours.size())
        throw ShapeError("demand has " + std::to_string(demand.size()) + " entries, partition has " +
                         std::to_string(hours.size()) + " non-empty periods");
    return detail::build_uc(fleet, Stage::da, partition, periods, hours, {demand}, false, nullptr);
}

/// Day-ahead UC over equiprobable scenarios with here-and-now commitment and dispatch.
inline UcProblem build_da_uc_stochastic(const Fleet& fleet, const TimePartition& partition,
                                        const ScenarioSet& scenarios) {
    scenarios.validate();
    std::vector<int> periods;
    std::vector<double> hours;
    detail::active_columns(partition, periods, hours);
    std::vector<std::vector<double>> demand;
    for (const auto& s : scenarios.scenarios) demand.push_back(aggregate_demand(s, partition));
    return detail::build_uc(fleet, Stage::da, partition, periods, hours, std::move(demand), true, nullptr);
}

/// Real-time dispatch on the series grid. Baseload units inherit commitment and output,
/// intermediate units inherit commitment; peaking units stay free.
inline UcProblem build_rt_ed(const Fleet& fleet, const NetLoadSeries& rt_series, const Schedule& da,
                             const TimePartition& partition) {
    rt_series.validate();
    if (da.stage != Stage::da) throw ShapeError("RT dispatch needs a DA-stage schedule");
    if (!(da.partition == partition)) throw ShapeError("DA schedule was built on a different partition");
    if (partition.horizon_minutes() != rt_series.horizon_minutes())
        throw ShapeError("partition horizon does not match the RT series");
    if (da.on.size() != fleet.units.size()) throw ShapeError("DA schedule has a different number of units");
    const auto map = da_to_rt_index_map(partition, rt_series.step_minutes);
    const auto N = static_cast<int>(rt_series.size());

    std::vector<detail::Inherited> inherit(fleet.units.size());
    for (std::size_t g = 0; g < fleet.units.size(); ++g) {
        auto cls = fleet.units[g].unit_class;
        auto& in = inherit[g];
        in.commit = cls != UnitClass::peaking;
        in.power = cls == UnitClass::baseload;
        in.u.assign(static_cast<std::size_t>(N), 0.0);
        in.p.assign(static_cast<std::size_t>(N), 0.0);
        for (std::size_t k = 0; k < da.columns(); ++k) {
            const auto& r = map[static_cast<std::size_t>(da.periods[k])];
            for (int i = r.first; i < r.last; ++i) {
                in.u[static_cast<std::size_t>(i)] = da.on[g][k];
                in.p[static_cast<std::size_t>(i)] = da.power[g][k];
            }
        }
    }
    std::vector<int> periods(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) periods[static_cast<std::size_t>(i)] = i;
    std::vector<double> hours(static_cast<std::size_t>(N), rt_series.step_minutes / 60.0);
    auto grid = uniform_partition(N, rt_series.horizon_minutes(), rt_series.step_minutes);
    return detail::build_uc(fleet, Stage::rt, grid, periods, hours, {rt_series.values}, false, &inherit);
}

/// Reads a solved problem back into a Schedule.
inline Schedule extract_schedule(const UcProblem& pb, const Solution& sol) {
    if (sol.values.size() != pb.instance.variables().size())
        throw ShapeError("solution does not belong to this problem");
    Schedule s;
    s.stage = pb.stage;
    s.partition = pb.partition;
    s.periods = pb.periods;
    s.hours = pb.hours;
    s.objective = sol.objective;
    const std::size_t G = pb.u.size(), T = pb.hours.size();
    auto val = [&](int j) { return j < 0 ? 0.0 : sol.values[static_cast<std::size_t>(j)]; };
    s.on.assign(G, std::vector<std::uint8_t>(T, 0));
    s.power = s.startup = s.shutdown = std::vector<std::vector<double>>(G, std::vector<double>(T, 0.0));
    for (std::size_t g = 0; g < G; ++g)
        for (std::size_t t = 0; t < T; ++t) {
            s.on[g][t] = val(pb.u[g][t]) > 0.5 ? 1 : 0;
            s.power[g][t] = val(pb.p[g][t]);
            s.startup[g][t] = val(pb.su[g][t]);
            s.shutdown[g][t] = val(pb.sd[g][t]);
        }
    const double S = static_cast<double>(pb.pd.size());
    s.served.assign(T, 0.0);
    s.shed.assign(T, 0.0);
    s.spill.assign(T, 0.0);
    for (std::size_t w = 0; w < pb.pd.size(); ++w)
        for (std::size_t t = 0; t < T; ++t) {
            double served = val(pb.pd[w][t]);
            s.served[t] += served / S;
            s.shed[t] += (std::max(pb.demand[w][t], 0.0) - served) / S;
            s.spill[t] += val(pb.sp[w][t]) / S;
        }
    return s;
}

/// Solves a UC problem to optimality or throws SolverError.
inline Schedule solve_uc(const UcProblem& pb, double abs_gap = 1e-6) {
    auto sol = solve_milp(pb.instance, abs_gap);
    if (!sol.ok())
        throw SolverError(std::string(to_string(pb.stage)) + " problem not solved: " +
                          std::string(to_string(sol.status)) +
                          (sol.diagnostics.empty() ? "" : " (" + sol.diagnostics + ")"));
    return extract_schedule(pb, sol);
}

/// Cost of each schedule column: operation, start/stop and shedding.
inline std::vector<double> column_costs(const Schedule& s, const Fleet& fleet) {
    if (s.on.size() != fleet.units.size()) throw ShapeError("schedule and fleet differ in unit count");
    std::vector<double> out(s.columns(), 0.0);
    for (std::size_t t = 0; t < s.columns(); ++t) {
        double c = (fleet.shed_cost * s.shed[t] + fleet.spill_cost * s.spill[t]) * s.hours[t];
        for (std::size_t g = 0; g < fleet.units.size(); ++g)
            c += fleet.units[g].marginal_cost * s.power[g][t] * s.hours[t] + s.startup[g][t] + s.shutdown[g][t];
        out[t] = c;
    }
    return out;
}

inline CostBreakdown cost_breakdown(const Schedule& s, const Fleet& fleet) {
    if (s.on.size() != fleet.units.size()) throw ShapeError("schedule and fleet differ in unit count");
    CostBreakdown b;
    for (std::size_t g = 0; g < fleet.units.size(); ++g) {
        const auto& un = fleet.units[g];
        if (s.power[g].size() != s.columns()) throw ShapeError("schedule rows have inconsistent lengths");
        double op = 0.0;
        for (std::size_t t = 0; t < s.columns(); ++t) {
            if (!s.on[g][t] && s.power[g][t] > 1e-6)
                throw InvariantError("unit '" + un.id + "' produces while decommitted");
            op += un.marginal_cost * s.power[g][t] * s.hours[t];
            b.start_stop += s.startup[g][t] + s.shutdown[g][t];
        }
        switch (un.unit_class) {
            case UnitClass::baseload: b.op_baseload += op; break;
            case UnitClass::intermediate: b.op_intermediate += op; break;
            case UnitClass::peaking: b.op_peaking += op; break;
        }
    }
    for (std::size_t t = 0; t < s.columns(); ++t) b.shed += (fleet.shed_cost * s.shed[t] + fleet.spill_cost * s.spill[t]) * s.hours[t];
    b.total = b.start_stop + b.op_baseload + b.op_intermediate + b.op_peaking + b.shed;
    return b;
}

}  // namespace costres
