#pragma once

// Boundary search over time partitions: the greedy coordinate sweep and the discrete
// Adam variant. Both are generic in the cost function, which maps a TimePartition to a
// cost and must be safe to call concurrently. Point t (0-based) is the right edge of
// period t; moving it changes the lengths of periods t and t+1 only.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "costres/error.hpp"
#include "costres/parallel.hpp"
#include "costres/partition.hpp"

namespace costres {

struct SearchOptions {
    int max_iter = 50;
    unsigned threads = 1;
    /// Costs closer than rel_tol * max(1, |cost|) count as equal.
    double rel_tol = 1e-9;
};

struct TraceEntry {
    int iteration = 0;  // 0 is the starting point
    double rt_cost = 0.0;
    TimePartition partition;
    std::map<std::size_t, int> proposals;  // point -> proposed length of its period
    bool single_move = false;              // aggregated move rejected, best single move taken
    double wall_seconds = 0.0;
};

struct Trace {
    std::vector<TraceEntry> entries;

    [[nodiscard]] std::vector<double> costs() const {
        std::vector<double> out;
        for (const auto& e : entries) out.push_back(e.rt_cost);
        return out;
    }
    [[nodiscard]] bool non_increasing() const {
        for (std::size_t i = 1; i < entries.size(); ++i)
            if (entries[i].rt_cost > entries[i - 1].rt_cost) return false;
        return true;
    }
};

struct SearchResult {
    TimePartition final;
    double cost = 0.0;
    Trace trace;
    int iterations = 0;  // sweeps performed, including the one that found no move
    long evaluations = 0;
    bool converged = false;
};

inline bool strictly_lower(double a, double b, double rel_tol) {
    return a < b - rel_tol * std::max(1.0, std::abs(b));
}

/// Lengths point t may take in one sweep, ascending.
inline std::vector<int> point_candidates(const TimePartition& p, std::size_t t) {
    if (t + 1 >= p.size()) throw InvariantError("point index " + std::to_string(t) + " out of range");
    return range_candidates(adaptive_range(p, t), p.grid_minutes());
}

struct PointChoice {
    int length = 0;
    double cost = 0.0;
};

/// Picks the cheapest candidate. Ties go to the current length, then the smaller shift,
/// then the shorter length.
inline PointChoice select_candidate(int current, double current_cost, const std::vector<int>& lengths,
                                    const std::vector<double>& costs, double rel_tol) {
    if (lengths.size() != costs.size()) throw ShapeError("candidate lengths and costs differ in size");
    std::vector<std::size_t> order(lengths.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        int da = std::abs(lengths[a] - current), db = std::abs(lengths[b] - current);
        return da != db ? da < db : lengths[a] < lengths[b];
    });
    PointChoice best{current, current_cost};
    for (std::size_t i : order) {
        if (lengths[i] == current) continue;
        if (strictly_lower(costs[i], best.cost, rel_tol)) best = {lengths[i], costs[i]};
    }
    return best;
}

namespace detail {

template <class Cost>
class CountingCost {
public:
    explicit CountingCost(Cost& cost) : cost_(cost) {}
    double operator()(const TimePartition& p) {
        calls_.fetch_add(1, std::memory_order_relaxed);
        return cost_(p);
    }
    [[nodiscard]] long calls() const { return calls_.load(); }

private:
    Cost& cost_;
    std::atomic<long> calls_{0};
};

struct Job {
    std::size_t point;
    int length;
};

template <class Cost>
std::vector<double> evaluate_jobs(CountingCost<Cost>& cost, const TimePartition& p, const std::vector<Job>& jobs,
                                  unsigned threads) {
    std::vector<double> out(jobs.size());
    parallel_for(jobs.size(), threads,
                 [&](std::size_t i) { out[i] = cost(move_boundary(p, jobs[i].point, jobs[i].length)); });
    return out;
}

// Aggregates improving point moves; falls back to the best single move when the combined
// partition is not strictly cheaper. `single` maps each moved point to its own cost.
template <class Cost>
std::pair<TimePartition, double> aggregate(CountingCost<Cost>& cost, const TimePartition& cur, double cur_cost,
                                           const std::map<std::size_t, int>& alter,
                                           const std::map<std::size_t, double>& single, double rel_tol,
                                           bool& single_move) {
    single_move = false;
    if (alter.size() == 1) {
        auto [t, len] = *alter.begin();
        return {move_boundary(cur, t, len), single.at(t)};
    }
    auto next = apply_point_updates(cur, alter);
    double c = cost(next);
    if (strictly_lower(c, cur_cost, rel_tol)) return {next, c};
    single_move = true;
    std::size_t best = alter.begin()->first;
    for (const auto& [t, c_t] : single)
        if (c_t < single.at(best)) best = t;
    return {move_boundary(cur, best, alter.at(best)), single.at(best)};
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

/// Best length for point t against the frozen partition p, whose cost is `current_cost`.
template <class Cost>
PointChoice greedy_point_search(Cost&& cost, const TimePartition& p, std::size_t t, double current_cost,
                                const SearchOptions& opt = {}) {
    auto lengths = point_candidates(p, t);
    if (lengths.empty()) throw InvariantError("point " + std::to_string(t) + " has no candidate lengths");
    std::vector<double> costs(lengths.size(), current_cost);
    const int x = p.length(t);
    parallel_for(lengths.size(), opt.threads, [&](std::size_t i) {
        if (lengths[i] != x) costs[i] = cost(move_boundary(p, t, lengths[i]));
    });
    return select_candidate(x, current_cost, lengths, costs, opt.rel_tol);
}

/// Jacobi sweeps of exhaustive point searches until no point moves.
template <class Cost>
SearchResult greedy_search(const TimePartition& initial, Cost& cost_fn, const SearchOptions& opt = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    detail::CountingCost<Cost> cost(cost_fn);
    SearchResult res;
    TimePartition cur = initial;
    double cur_cost = cost(cur);
    res.trace.entries.push_back({0, cur_cost, cur, {}, false, detail::seconds_since(t0)});
    const std::size_t points = cur.size() - 1;

    for (int it = 1; it <= opt.max_iter; ++it) {
        res.iterations = it;
        std::vector<detail::Job> jobs;
        std::vector<std::vector<int>> lengths(points);
        for (std::size_t t = 0; t < points; ++t) {
            lengths[t] = point_candidates(cur, t);
            for (int len : lengths[t])
                if (len != cur.length(t)) jobs.push_back({t, len});
        }
        auto job_costs = detail::evaluate_jobs(cost, cur, jobs, opt.threads);

        std::map<std::size_t, int> alter;
        std::map<std::size_t, double> single;
        std::size_t j = 0;
        for (std::size_t t = 0; t < points; ++t) {
            std::vector<double> c(lengths[t].size(), cur_cost);
            for (std::size_t i = 0; i < lengths[t].size(); ++i)
                if (lengths[t][i] != cur.length(t)) c[i] = job_costs[j++];
            auto choice = select_candidate(cur.length(t), cur_cost, lengths[t], c, opt.rel_tol);
            if (choice.length != cur.length(t)) {
                alter[t] = choice.length;
                single[t] = choice.cost;
            }
        }
        if (alter.empty()) {
            res.converged = true;
            break;
        }
        bool fallback = false;
        auto [next, next_cost] = detail::aggregate(cost, cur, cur_cost, alter, single, opt.rel_tol, fallback);
        cur = std::move(next);
        cur_cost = next_cost;
        res.trace.entries.push_back({it, cur_cost, cur, alter, fallback, detail::seconds_since(t0)});
    }
    res.final = cur;
    res.cost = cur_cost;
    res.evaluations = cost.calls();
    return res;
}

// ---------------------------------------------------------------------------
// Discrete Adam

struct AdamParams {
    double alpha = 3.0;  // step multiplier, in grid steps
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    /// Step to x - delta first, as the update rule reads literally. The default steps
    /// against the cost slope first; either way the other sign is tried on failure.
    bool literal_sign = false;

    void validate() const {
        if (!(alpha > 0.0)) throw InvariantError("Adam alpha must be > 0");
        if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
            throw InvariantError("Adam betas must lie in [0, 1)");
        if (!(epsilon > 0.0)) throw InvariantError("Adam epsilon must be > 0");
    }
};

struct AdamState {
    std::vector<double> m, v;  // per point, EUR/min and (EUR/min)^2
    int k = 0;                 // completed iterations
    AdamParams hyper;

    AdamState() = default;
    AdamState(std::size_t points, AdamParams h) : m(points, 0.0), v(points, 0.0), hyper(h) { hyper.validate(); }
};

/// (C_left - C_right) / (2 grid): positive when lengthening period t is cheaper.
inline double centered_difference(double c_left, double c_right, int grid_minutes) {
    return (c_left - c_right) / (2.0 * grid_minutes);
}

struct AdamStep {
    int length = 0;  // proposed length of the point's period
    int opposite = 0;
    int steps = 0;   // rounded step count before clamping
    double m = 0.0;
    double v = 0.0;
};

/// One moment update and proposal for point q. The proposal and its opposite-sign
/// alternative are clamped to the nearest grid lengths inside the adaptive range.
inline AdamStep adam_point_step(const AdamState& s, std::size_t q, double g, const AdaptiveRange& r, int x,
                                int grid_minutes) {
    if (q >= s.m.size()) throw InvariantError("Adam state has no point " + std::to_string(q));
    const auto& h = s.hyper;
    AdamStep out;
    out.m = h.beta1 * s.m[q] + (1.0 - h.beta1) * g;
    out.v = h.beta2 * s.v[q] + (1.0 - h.beta2) * g * g;
    double m_hat = out.m / (1.0 - std::pow(h.beta1, s.k + 1));
    double v_hat = out.v / (1.0 - std::pow(h.beta2, s.k + 1));
    out.steps = static_cast<int>(std::lround(h.alpha * m_hat / std::sqrt(v_hat + h.epsilon)));
    const int delta = out.steps * grid_minutes;
    auto cand = range_candidates(r, grid_minutes);
    auto clamp = [&](int len) { return cand.empty() ? x : std::clamp(len, cand.front(), cand.back()); };
    int forward = h.literal_sign ? x - delta : x + delta;
    int backward = h.literal_sign ? x + delta : x - delta;
    out.length = delta == 0 ? x : clamp(forward);
    out.opposite = delta == 0 ? x : clamp(backward);
    return out;
}

struct PointGradient {
    double g = 0.0;
    std::optional<double> c_left, c_right;  // costs one grid step shorter / longer
};

/// Centered difference at point t, one-sided where a shift would leave the range.
template <class Cost>
PointGradient adam_point_gradient(Cost&& cost, const TimePartition& p, std::size_t t, double current_cost) {
    auto r = adaptive_range(p, t);
    const int x = p.length(t), L = p.grid_minutes();
    PointGradient pg;
    if (r.contains(x - L)) pg.c_left = cost(move_boundary(p, t, x - L));
    if (r.contains(x + L)) pg.c_right = cost(move_boundary(p, t, x + L));
    if (pg.c_left && pg.c_right) pg.g = centered_difference(*pg.c_left, *pg.c_right, L);
    else if (pg.c_right) pg.g = (current_cost - *pg.c_right) / L;
    else if (pg.c_left) pg.g = (*pg.c_left - current_cost) / L;
    return pg;
}

template <class Cost>
SearchResult adam_search(const TimePartition& initial, Cost& cost_fn, const AdamParams& hyper,
                         const SearchOptions& opt = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    detail::CountingCost<Cost> cost(cost_fn);
    SearchResult res;
    TimePartition cur = initial;
    double cur_cost = cost(cur);
    res.trace.entries.push_back({0, cur_cost, cur, {}, false, detail::seconds_since(t0)});
    const std::size_t points = cur.size() - 1;
    AdamState state(points, hyper);

    for (int it = 1; it <= opt.max_iter; ++it) {
        res.iterations = it;
        std::vector<PointGradient> grad(points);
        parallel_for(points, opt.threads,
                     [&](std::size_t t) { grad[t] = adam_point_gradient(cost, cur, t, cur_cost); });

        const int L = cur.grid_minutes();
        std::vector<AdamStep> step(points);
        for (std::size_t t = 0; t < points; ++t) {
            step[t] = adam_point_step(state, t, grad[t].g, adaptive_range(cur, t), cur.length(t), L);
            state.m[t] = step[t].m;
            state.v[t] = step[t].v;
        }
        ++state.k;

        auto known = [&](std::size_t t, int len) -> std::optional<double> {
            int x = cur.length(t);
            if (len == x) return cur_cost;
            if (len == x - L) return grad[t].c_left;
            if (len == x + L) return grad[t].c_right;
            return std::nullopt;
        };
        // Try the proposal, then the opposite sign for points whose proposal failed.
        std::map<std::size_t, int> alter;
        std::map<std::size_t, double> single;
        std::vector<char> settled(points, 0);
        for (int pass = 0; pass < 2; ++pass) {
            std::vector<detail::Job> jobs;
            std::vector<std::optional<double>> have;
            for (std::size_t t = 0; t < points; ++t) {
                if (settled[t]) continue;
                int len = pass == 0 ? step[t].length : step[t].opposite;
                if (len == cur.length(t) || (pass == 1 && len == step[t].length)) {
                    settled[t] = 1;
                    continue;
                }
                jobs.push_back({t, len});
                have.push_back(known(t, len));
            }
            std::vector<double> c(jobs.size());
            parallel_for(jobs.size(), opt.threads, [&](std::size_t i) {
                c[i] = have[i] ? *have[i] : cost(move_boundary(cur, jobs[i].point, jobs[i].length));
            });
            for (std::size_t i = 0; i < jobs.size(); ++i) {
                if (!strictly_lower(c[i], cur_cost, opt.rel_tol)) continue;
                alter[jobs[i].point] = jobs[i].length;
                single[jobs[i].point] = c[i];
                settled[jobs[i].point] = 1;
            }
        }
        // Points whose steps both failed fall back on a cheaper gradient probe, at no cost.
        for (std::size_t t = 0; t < points; ++t) {
            if (alter.count(t)) continue;
            const int x = cur.length(t);
            double best = cur_cost;
            int len = x;
            if (grad[t].c_left && strictly_lower(*grad[t].c_left, best, opt.rel_tol)) best = *grad[t].c_left, len = x - L;
            if (grad[t].c_right && strictly_lower(*grad[t].c_right, best, opt.rel_tol)) best = *grad[t].c_right, len = x + L;
            if (len != x) {
                alter[t] = len;
                single[t] = best;
            }
        }
        if (alter.empty()) {
            res.converged = true;
            break;
        }
        bool fallback = false;
        auto [next, next_cost] = detail::aggregate(cost, cur, cur_cost, alter, single, opt.rel_tol, fallback);
        cur = std::move(next);
        cur_cost = next_cost;
        res.trace.entries.push_back({it, cur_cost, cur, alter, fallback, detail::seconds_since(t0)});
    }
    res.final = cur;
    res.cost = cur_cost;
    res.evaluations = cost.calls();
    return res;
}

}  // namespace costres
