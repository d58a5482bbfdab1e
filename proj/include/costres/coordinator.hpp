#pragma once

// Partition evaluation (day-ahead UC on aggregated demand, then real-time dispatch on
// actuals), the greedy and Adam searches bound to it, warm start and the three
// fixed-rule baselines.

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "costres/error.hpp"
#include "costres/model.hpp"
#include "costres/partition.hpp"
#include "costres/search.hpp"
#include "costres/uc.hpp"

namespace costres {

enum class Mode { deterministic, probabilistic };

inline std::string_view to_string(Mode m) { return m == Mode::deterministic ? "deterministic" : "probabilistic"; }

struct EvalContext {
    Fleet fleet;
    NetLoadSeries rt_series;  // actuals
    ScenarioSet da;           // what the day-ahead stage optimizes against
    Mode mode = Mode::deterministic;
    int grid_minutes = 10;
    unsigned threads = 1;
    double abs_gap = 1e-6;

    void validate() const {
        fleet.validate();
        rt_series.validate();
        da.validate();
        if (mode == Mode::deterministic && da.scenarios.size() != 1)
            throw ShapeError("deterministic mode needs exactly one day-ahead series");
        for (const auto& s : da.scenarios)
            if (s.horizon_minutes() != rt_series.horizon_minutes() || s.step_minutes != rt_series.step_minutes)
                throw ShapeError("day-ahead series and real-time series differ in grid or horizon");
        if (grid_minutes <= 0 || grid_minutes % rt_series.step_minutes != 0)
            throw ShapeError("partition grid must be a positive multiple of the series step");
        if (rt_series.horizon_minutes() % grid_minutes != 0)
            throw ShapeError("partition grid does not divide the horizon");
    }

    [[nodiscard]] int horizon_minutes() const { return rt_series.horizon_minutes(); }

    /// Day-ahead series in deterministic mode, scenario mean otherwise.
    [[nodiscard]] NetLoadSeries da_view() const {
        return mode == Mode::deterministic ? da.scenarios.front() : da.mean();
    }
};

inline EvalContext make_context(Fleet fleet, NetLoadSeries actual, NetLoadSeries forecast, int grid_minutes = 10) {
    EvalContext c{std::move(fleet), std::move(actual), ScenarioSet{{std::move(forecast)}}, Mode::deterministic,
                  grid_minutes};
    c.validate();
    return c;
}

inline EvalContext make_context(Fleet fleet, NetLoadSeries actual, ScenarioSet scenarios, int grid_minutes = 10) {
    EvalContext c{std::move(fleet), std::move(actual), std::move(scenarios), Mode::probabilistic, grid_minutes};
    c.validate();
    return c;
}

struct Evaluation {
    double rt_cost = 0.0;
    Schedule da_schedule;
    Schedule rt_schedule;
    CostBreakdown breakdown;
};

inline Evaluation evaluate_partition(const EvalContext& ctx, const TimePartition& p) {
    if (p.horizon_minutes() != ctx.horizon_minutes())
        throw ShapeError("partition covers " + std::to_string(p.horizon_minutes()) + " min, context covers " +
                         std::to_string(ctx.horizon_minutes()) + " min");
    if (p.grid_minutes() % ctx.rt_series.step_minutes != 0)
        throw ShapeError("partition grid is not a multiple of the series step");
    auto da = ctx.mode == Mode::deterministic
                  ? build_da_uc(ctx.fleet, p, aggregate_demand(ctx.da.scenarios.front(), p))
                  : build_da_uc_stochastic(ctx.fleet, p, ctx.da);
    Evaluation e;
    e.da_schedule = solve_uc(da, ctx.abs_gap);
    auto rt = build_rt_ed(ctx.fleet, ctx.rt_series, e.da_schedule, p);
    e.rt_schedule = solve_uc(rt, ctx.abs_gap);
    e.rt_cost = e.rt_schedule.objective;
    e.breakdown = cost_breakdown(e.rt_schedule, ctx.fleet);
    return e;
}

/// Cost-only view of evaluate_partition for the searches.
struct PartitionCost {
    const EvalContext* ctx;
    double operator()(const TimePartition& p) const { return evaluate_partition(*ctx, p).rt_cost; }
};

inline SearchOptions search_options(const EvalContext& ctx, int max_iter) {
    SearchOptions o;
    o.max_iter = max_iter;
    o.threads = ctx.threads;
    return o;
}

inline SearchResult greedy_optimize(const EvalContext& ctx, const TimePartition& initial, int max_iter = 50) {
    PartitionCost cost{&ctx};
    return greedy_search(initial, cost, search_options(ctx, max_iter));
}

inline SearchResult adam_optimize(const EvalContext& ctx, const TimePartition& initial, const AdamParams& hyper = {},
                                  int max_iter = 50) {
    PartitionCost cost{&ctx};
    return adam_search(initial, cost, hyper, search_options(ctx, max_iter));
}

// ---------------------------------------------------------------------------
// Baselines

struct BaselineResult {
    TimePartition partition;
    Evaluation eval;
};

namespace detail {

// Means over grid-sized blocks of a series.
inline std::vector<double> block_means(const std::vector<double>& values, int step, int grid) {
    const auto per = static_cast<std::size_t>(grid / step);
    std::vector<double> out;
    for (std::size_t i = 0; i < values.size(); i += per) {
        double s = 0.0;
        for (std::size_t k = i; k < i + per; ++k) s += values[k];
        out.push_back(s / static_cast<double>(per));
    }
    return out;
}

inline TimePartition ward_partition(const EvalContext& ctx, const std::vector<double>& series, int T) {
    auto blocks = block_means(series, ctx.rt_series.step_minutes, ctx.grid_minutes);
    return adjacent_ward_merge(blocks, T, ctx.grid_minutes);
}

}  // namespace detail

inline TimePartition ch_partition(const EvalContext& ctx, int T) {
    return uniform_partition(T, ctx.horizon_minutes(), ctx.grid_minutes);
}

/// Adjacent Ward clustering of the day-ahead net load.
inline TimePartition ta_partition(const EvalContext& ctx, int T) {
    return detail::ward_partition(ctx, ctx.da_view().values, T);
}

inline BaselineResult baseline_ch(const EvalContext& ctx, int T) {
    auto p = ch_partition(ctx, T);
    return {p, evaluate_partition(ctx, p)};
}

inline BaselineResult baseline_ta(const EvalContext& ctx, int T) {
    auto p = ta_partition(ctx, T);
    return {p, evaluate_partition(ctx, p)};
}

/// Adjacent Ward clustering of the per-interval real-time cost of the CH pipeline.
inline BaselineResult baseline_na(const EvalContext& ctx, int T, const Evaluation* ch = nullptr) {
    Evaluation own;
    if (!ch) {
        own = baseline_ch(ctx, T).eval;
        ch = &own;
    }
    auto p = detail::ward_partition(ctx, column_costs(ch->rt_schedule, ctx.fleet), T);
    return {p, evaluate_partition(ctx, p)};
}

// ---------------------------------------------------------------------------
// Warm start

/// Clusters the earlier forecast to T periods and refines it with Adam against that forecast.
inline SearchResult warm_start_offline(const EvalContext& offline, int T, const AdamParams& hyper = {},
                                       int max_iter = 50) {
    return adam_optimize(offline, ta_partition(offline, T), hyper, max_iter);
}

inline SearchResult online_refine(const EvalContext& online, const TimePartition& offline_partition,
                                  const AdamParams& hyper = {}, int max_iter = 50) {
    return adam_optimize(online, offline_partition, hyper, max_iter);
}

}  // namespace costres
