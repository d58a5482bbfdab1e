#pragma once

// The four commands behind the command-line tool. Each reads a RunConfig, runs the
// pipeline and writes its files into the configured output directory.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "costres/config.hpp"
#include "costres/coordinator.hpp"
#include "costres/report.hpp"

namespace costres {

enum ExitCode : int { kExitOk = 0, kExitInternal = 1, kExitConfig = 2, kExitSolver = 3 };

/// Outcome of one method on one context.
struct MethodRun {
    TimePartition partition;
    Evaluation eval;
    Trace trace;  // a single entry for the fixed-rule baselines
    int iterations = 0;
    long evaluations = 1;
    bool converged = true;
};

namespace detail {

inline Trace single_entry(const TimePartition& p, double cost) {
    Trace t;
    t.entries.push_back({0, cost, p, {}, false, 0.0});
    return t;
}

inline MethodRun from_baseline(BaselineResult r, long evaluations) {
    MethodRun m;
    m.trace = single_entry(r.partition, r.eval.rt_cost);
    m.partition = std::move(r.partition);
    m.eval = std::move(r.eval);
    m.evaluations = evaluations;
    return m;
}

inline MethodRun from_search(const EvalContext& ctx, SearchResult s, long extra_evaluations = 0) {
    MethodRun m;
    m.partition = s.final;
    m.eval = evaluate_partition(ctx, s.final);
    m.trace = std::move(s.trace);
    m.iterations = s.iterations;
    m.evaluations = s.evaluations + extra_evaluations;
    m.converged = s.converged;
    return m;
}

inline void require_divisible(const EvalContext& ctx, int T) {
    const int slots = ctx.horizon_minutes() / ctx.grid_minutes;
    if (T > slots) throw ConfigError("T = " + std::to_string(T) + " exceeds the " + std::to_string(slots) + " grid steps");
    if (slots % T != 0)
        throw ConfigError("T = " + std::to_string(T) + " does not split the horizon into equal grid-aligned hours");
}

}  // namespace detail

/// Runs one method. Searches start from the TA partition, or from `warm` when given.
inline MethodRun run_method(const EvalContext& ctx, Method method, int T, const RunConfig& cfg,
                            const TimePartition* warm = nullptr) {
    switch (method) {
        case Method::ch:
            detail::require_divisible(ctx, T);
            return detail::from_baseline(baseline_ch(ctx, T), 1);
        case Method::na:
            detail::require_divisible(ctx, T);
            return detail::from_baseline(baseline_na(ctx, T), 2);
        case Method::ta:
            return detail::from_baseline(baseline_ta(ctx, T), 1);
        case Method::co_greedy:
        case Method::co_adam: {
            auto start = warm ? *warm : ta_partition(ctx, T);
            if (static_cast<int>(start.size()) != T)
                throw ConfigError("warm-start partition has " + std::to_string(start.size()) + " periods, T = " +
                                  std::to_string(T));
            auto s = method == Method::co_greedy ? greedy_optimize(ctx, start, cfg.max_iter)
                                                 : adam_optimize(ctx, start, cfg.adam, cfg.max_iter);
            return detail::from_search(ctx, std::move(s));
        }
    }
    throw ConfigError("unknown method");
}

inline std::filesystem::path prepare_out_dir(const RunConfig& cfg) {
    std::filesystem::path dir(cfg.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + cfg.out_dir + "': " + ec.message());
    return dir;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    return out;
}

inline bool is_search(Method m) { return m == Method::co_greedy || m == Method::co_adam; }

/// Day-ahead model of `p` as the evaluation builds it.
inline UcProblem da_problem(const EvalContext& ctx, const TimePartition& p) {
    return ctx.mode == Mode::deterministic ? build_da_uc(ctx.fleet, p, aggregate_demand(ctx.da.scenarios.front(), p))
                                           : build_da_uc_stochastic(ctx.fleet, p, ctx.da);
}

/// Writes result.json and trace.csv, plus timing.json with the wall time. With
/// `export_lp`, also da.lp: the day-ahead model of the final partition.
inline RunSummary cmd_run(const RunConfig& cfg, bool warm_start = false, bool export_lp = false) {
    const auto t0 = std::chrono::steady_clock::now();
    if (warm_start && !is_search(cfg.method)) throw ConfigError("--warm-start needs method co-greedy or co-adam");
    auto inputs = load_inputs(cfg);
    auto ctx = online_context(cfg, inputs);
    auto dir = prepare_out_dir(cfg);

    MethodRun run;
    long offline_evaluations = 0;
    if (warm_start) {
        auto offline = warm_start_offline(offline_context(cfg, inputs), cfg.T, cfg.adam, cfg.max_iter);
        offline_evaluations = offline.evaluations;
        run = run_method(ctx, cfg.method, cfg.T, cfg, &offline.final);
    } else {
        run = run_method(ctx, cfg.method, cfg.T, cfg);
    }

    RunSummary s;
    s.method = cfg.method;
    s.mode = ctx.mode;
    s.T = cfg.T;
    s.grid_minutes = cfg.grid_minutes;
    s.seed = cfg.seed;
    s.warm_start = warm_start;
    s.partition = run.partition;
    s.breakdown = run.eval.breakdown;
    s.iterations = run.iterations;
    s.evaluations = run.evaluations;
    s.converged = run.converged;

    open_out(dir / "result.json") << summary_json(s).dump(2) << '\n';
    auto trace_out = open_out(dir / "trace.csv");
    write_trace_csv(trace_out, trace_rows(run.trace));

    nlohmann::ordered_json timing;
    timing["schema_version"] = kResultSchemaVersion;
    timing["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    timing["offline_evaluations"] = offline_evaluations;
    std::vector<double> sweeps;
    for (const auto& e : run.trace.entries) sweeps.push_back(e.wall_seconds);
    timing["sweep_wall_seconds"] = sweeps;
    open_out(dir / "timing.json") << timing.dump(2) << '\n';
    if (export_lp) {
        auto lp = open_out(dir / "da.lp");
        write_lp(lp, da_problem(ctx, run.partition).instance);
    }
    return s;
}

/// The four methods on one day; co uses the configured search (greedy unless co-adam).
inline std::vector<CompareRow> compare_rows(const EvalContext& ctx, int T, const RunConfig& cfg) {
    detail::require_divisible(ctx, T);
    auto ch = baseline_ch(ctx, T);
    auto na = baseline_na(ctx, T, &ch.eval);
    auto ta = baseline_ta(ctx, T);
    auto co = run_method(ctx, cfg.method == Method::co_adam ? Method::co_adam : Method::co_greedy, T, cfg);
    const double base = ch.eval.breakdown.total;
    std::vector<CompareRow> rows;
    for (auto [name, b] : {std::pair{"ch", ch.eval.breakdown}, std::pair{"na", na.eval.breakdown},
                           std::pair{"ta", ta.eval.breakdown}, std::pair{"co", co.eval.breakdown}})
        rows.push_back({name, b, reduction_pct(base, b.total)});
    rows.front().reduction_vs_ch_pct = 0.0;
    return rows;
}

inline std::vector<CompareRow> cmd_compare(const RunConfig& cfg) {
    auto inputs = load_inputs(cfg);
    auto ctx = online_context(cfg, inputs);
    auto dir = prepare_out_dir(cfg);
    auto rows = compare_rows(ctx, cfg.T, cfg);
    auto out = open_out(dir / "compare.csv");
    write_compare_csv(out, rows);
    return rows;
}

inline std::vector<SweepRow> sweep_rows(const EvalContext& ctx, const std::vector<int>& T_list, const RunConfig& cfg) {
    std::vector<SweepRow> rows;
    for (int T : T_list)
        for (const auto& r : compare_rows(ctx, T, cfg)) rows.push_back({T, r.method, r.breakdown.total});
    return rows;
}

inline std::vector<SweepRow> cmd_sweep(const RunConfig& cfg) {
    auto inputs = load_inputs(cfg);
    auto ctx = online_context(cfg, inputs);
    auto dir = prepare_out_dir(cfg);
    auto rows = sweep_rows(ctx, cfg.T_list, cfg);
    auto out = open_out(dir / "sweep.csv");
    write_sweep_csv(out, rows);
    return rows;
}

struct TracePair {
    std::vector<TraceRow> cold;
    std::vector<TraceRow> warm;  // empty without warm start
};

/// Cold start from the TA partition of the day; warm start from the partition refined
/// offline on the forecast. Writes trace_cold.csv and, with warm start, trace_warm.csv.
inline TracePair cmd_trace(const RunConfig& cfg, bool with_warm_start) {
    if (!is_search(cfg.method)) throw ConfigError("trace needs method co-greedy or co-adam");
    auto inputs = load_inputs(cfg);
    auto ctx = online_context(cfg, inputs);
    auto dir = prepare_out_dir(cfg);
    TracePair pair;
    pair.cold = trace_rows(run_method(ctx, cfg.method, cfg.T, cfg).trace);
    auto cold_out = open_out(dir / "trace_cold.csv");
    write_trace_csv(cold_out, pair.cold);
    if (with_warm_start) {
        auto offline = warm_start_offline(offline_context(cfg, inputs), cfg.T, cfg.adam, cfg.max_iter);
        pair.warm = trace_rows(run_method(ctx, cfg.method, cfg.T, cfg, &offline.final).trace);
        auto warm_out = open_out(dir / "trace_warm.csv");
        write_trace_csv(warm_out, pair.warm);
    }
    return pair;
}

/// Maps an exception from a command to the tool's exit code.
inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const SolverError*>(&e)) return kExitSolver;
    if (dynamic_cast<const Error*>(&e)) return kExitConfig;
    return kExitInternal;
}

}  // namespace costres
