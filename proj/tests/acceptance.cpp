// Acceptance run: one PASS/FAIL line per criterion, plus indented info lines with the
// measured numbers. Exit status is the number of failed criteria.
//
// The duck-curve suite results (four methods over the T sweep) are computed once and
// shared by the descent, dominance and trend checks.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "costres/cli.hpp"
#include "costres/coordinator.hpp"
#include "costres/corpus.hpp"
#include "costres/solver.hpp"

using namespace costres;

namespace {

constexpr std::uint64_t kSuiteSeed = 2024;
constexpr std::uint64_t kNoisySeed = 2025;
constexpr int kSuiteSize = 30;
constexpr int kDominanceT = 24;
constexpr int kAdamT = 12;
const std::vector<int> kSweepT{1, 2, 3, 6, 12, 24};
const std::vector<std::string> kMethods{"ch", "na", "ta", "co"};

// Verdicts are printed together, in criterion order, once every check has run.
std::map<int, std::pair<bool, std::string>> verdicts;

void verdict(int id, bool pass, const std::string& what) {
    std::printf("    -> criterion %d %s\n", id, pass ? "passed" : "failed");
    verdicts[id] = {pass, what};
}

template <class... A>
void info(const char* fmt, A... args) {
    std::printf("    ");
    std::printf(fmt, args...);
    std::printf("\n");
    std::fflush(stdout);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// Small random UC instances

double draw(std::mt19937_64& g, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

Fleet small_fleet(std::mt19937_64& g, int units) {
    Fleet f;
    f.shed_cost = draw(g, 300.0, 900.0);
    f.spill_cost = std::round(draw(g, 0.0, 30.0));
    const UnitClass classes[] = {UnitClass::baseload, UnitClass::intermediate, UnitClass::peaking};
    for (int k = 0; k < units; ++k) {
        UnitSpec u;
        u.id = "G" + std::to_string(k);
        u.unit_class = classes[k % 3];
        u.p_min = k == 2 ? 0.0 : std::round(draw(g, 10.0, 50.0));
        u.p_max = u.p_min + std::round(draw(g, 40.0, 120.0));
        u.ramp_up = std::round(draw(g, 30.0, 200.0));
        u.ramp_down = std::round(draw(g, 30.0, 200.0));
        u.min_up = std::round(draw(g, 0.0, 3.0));
        u.min_down = std::round(draw(g, 0.0, 3.0));
        u.marginal_cost = draw(g, 10.0, 120.0);
        u.startup_cost = std::round(draw(g, 0.0, 400.0));
        u.shutdown_cost = std::round(draw(g, 0.0, 50.0));
        u.init_on = g() % 2 == 0;
        u.init_power = u.init_on ? u.p_min + std::round(draw(g, 0.0, u.p_max - u.p_min)) : 0.0;
        u.init_hours_in_state = std::round(draw(g, 0.0, 4.0));
        f.units.push_back(u);
    }
    f.validate();
    return f;
}

NetLoadSeries small_series(std::mt19937_64& g, int n, double peak) {
    NetLoadSeries s{10, {}};
    for (int i = 0; i < n; ++i) s.values.push_back(std::round(draw(g, 0.1 * peak, peak)));
    return s;
}

TimePartition random_partition(std::mt19937_64& g, int periods, int slots) {
    std::vector<int> cuts;
    while (static_cast<int>(cuts.size()) < periods - 1) {
        int c = 1 + static_cast<int>(g() % static_cast<std::uint64_t>(slots - 1));
        if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<int> lengths;
    int prev = 0;
    for (int c : cuts) lengths.push_back((c - prev) * 10), prev = c;
    lengths.push_back((slots - prev) * 10);
    return TimePartition(lengths, 10);
}

void criterion_oracle() {
    std::mt19937_64 g(101);
    const auto t0 = std::chrono::steady_clock::now();
    int agree = 0, stochastic = 0;
    double worst = 0.0;
    int max_bins = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const int units = 2 + rep % 2;
        const int periods = std::min(4, 12 / units) - static_cast<int>(rep % 3 == 0);
        auto f = small_fleet(g, units);
        double cap = 0.0;
        for (const auto& u : f.units) cap += u.p_max;
        auto series = small_series(g, 12, 1.1 * cap);
        auto part = random_partition(g, periods, 12);
        UcProblem pb = rep % 5 == 4
                           ? build_da_uc_stochastic(f, part, ScenarioSet{{series, small_series(g, 12, 1.1 * cap)}})
                           : build_da_uc(f, part, aggregate_demand(series, part));
        stochastic += rep % 5 == 4;
        int bins = 0;
        for (const auto& v : pb.instance.variables()) bins += v.is_binary;
        max_bins = std::max(max_bins, bins);
        const double a = solve_milp(pb.instance).objective;
        const double b = brute_force(pb.instance).objective;
        worst = std::max(worst, std::abs(a - b));
        agree += std::abs(a - b) <= 1e-6 && bins <= 12;
    }
    const double secs = seconds_since(t0);
    info("50 instances (%d stochastic), up to %d binaries, worst |milp - brute| = %.3g, %.2f s", stochastic,
         max_bins, worst, secs);
    verdict(1, agree == 50 && secs < 60.0, "MILP matches brute force on 50 random UC instances within 1e-6, < 60 s");
}

void criterion_anchor() {
    std::mt19937_64 g(202);
    int agree = 0;
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        auto f = small_fleet(g, 3);
        double cap = 0.0;
        for (const auto& u : f.units) cap += u.p_max;
        const int n = 6 + static_cast<int>(g() % 19);
        auto s = small_series(g, n, 1.05 * cap);
        auto ctx = make_context(f, s, s);
        auto e = evaluate_partition(ctx, uniform_partition(n, n * 10, 10));
        const double rel = std::abs(e.rt_cost - e.da_schedule.objective) / std::max(1.0, std::abs(e.da_schedule.objective));
        worst = std::max(worst, rel);
        agree += rel <= 1e-6;
    }
    info("worst relative RT-DA gap %.3g", worst);
    verdict(2, agree == 20, "full-resolution RT cost equals the DA optimum on 20 random instances");
}

// ---------------------------------------------------------------------------
// Duck-curve suite

struct SuiteResults {
    // [instance][T][method] -> total
    std::vector<std::map<int, std::map<std::string, double>>> totals;
    std::vector<double> ta_at_dominance, co_at_dominance;
    std::vector<SearchResult> greedy_runs;
    std::vector<SearchResult> adam_runs;
    // Adam-efficiency pairs at kAdamT, both started from CH.
    std::vector<double> greedy_cost, adam_cost;
    long greedy_evals = 0, adam_evals = 0;
    std::vector<double> eval_ratio;
};

SuiteResults run_suite() {
    SuiteResults r;
    auto suite = corpus::duck_suite(kSuiteSize, kSuiteSeed);
    for (const auto& inst : suite) {
        const auto t0 = std::chrono::steady_clock::now();
        auto ctx = make_context(inst.fleet, inst.actual, inst.actual);
        std::map<int, std::map<std::string, double>> row;
        for (int T : kSweepT) {
            auto ch = baseline_ch(ctx, T);
            auto na = baseline_na(ctx, T, &ch.eval);
            auto ta = baseline_ta(ctx, T);
            auto co = greedy_optimize(ctx, ta.partition);
            row[T] = {{"ch", ch.eval.rt_cost}, {"na", na.eval.rt_cost}, {"ta", ta.eval.rt_cost}, {"co", co.cost}};
            if (T == kDominanceT) {
                r.ta_at_dominance.push_back(ta.eval.rt_cost);
                r.co_at_dominance.push_back(co.cost);
            }
            if (T == kAdamT) {
                auto gr = greedy_optimize(ctx, ch.partition);
                auto ad = adam_optimize(ctx, ch.partition);
                r.greedy_cost.push_back(gr.cost);
                r.adam_cost.push_back(ad.cost);
                r.greedy_evals += gr.evaluations;
                r.adam_evals += ad.evaluations;
                r.eval_ratio.push_back(static_cast<double>(ad.evaluations) / static_cast<double>(gr.evaluations));
                r.greedy_runs.push_back(std::move(gr));
                r.adam_runs.push_back(std::move(ad));
            }
            r.greedy_runs.push_back(std::move(co));
        }
        r.totals.push_back(std::move(row));
        info("%s done in %.1f s", inst.name.c_str(), seconds_since(t0));
    }
    return r;
}

void criterion_dominance(const SuiteResults& r) {
    int le = 0, strict = 0;
    const int n = static_cast<int>(r.ta_at_dominance.size());
    std::vector<double> gain;
    for (int i = 0; i < n; ++i) {
        const double ta = r.ta_at_dominance[static_cast<std::size_t>(i)];
        const double co = r.co_at_dominance[static_cast<std::size_t>(i)];
        le += co <= ta;
        strict += strictly_lower(co, ta, 1e-9);
        gain.push_back(100.0 * (ta - co) / ta);
    }
    info("T = %d: CO <= TA on %d/%d, strictly lower on %d/%d (%.0f%%), median reduction %.4f%%", kDominanceT, le, n,
         strict, n, 100.0 * strict / n, median(gain));
    verdict(4, le == n && 10 * strict >= 7 * n, "greedy from TA never worse than TA, strictly better on >= 70%");
}

void criterion_trend(const SuiteResults& r) {
    bool monotone = true, co_best = true;
    int per_instance_le = 0, per_instance_cells = 0;
    std::map<std::string, std::vector<double>> med;
    for (int T : kSweepT) {
        std::string line = "T = " + std::to_string(T) + ":";
        std::map<std::string, double> m;
        for (const auto& name : kMethods) {
            std::vector<double> v;
            for (const auto& row : r.totals) v.push_back(row.at(T).at(name));
            m[name] = median(v);
            med[name].push_back(m[name]);
            char buf[64];
            std::snprintf(buf, sizeof buf, " %s %.1f", name.c_str(), m[name]);
            line += buf;
        }
        for (const auto& name : {"ch", "na", "ta"}) co_best = co_best && m["co"] <= m[name];
        for (const auto& row : r.totals)
            for (const auto& name : {"ch", "na", "ta"}) {
                per_instance_le += row.at(T).at("co") <= row.at(T).at(name);
                ++per_instance_cells;
            }
        info("%s", line.c_str());
    }
    for (const auto& [name, v] : med)
        for (std::size_t k = 1; k < v.size(); ++k)
            if (v[k] > v[k - 1]) {
                monotone = false;
                info("median of %s rises from T = %d to T = %d", name.c_str(), kSweepT[k - 1], kSweepT[k]);
            }
    info("per instance, CO <= baseline in %d of %d (instance, T, baseline) cells", per_instance_le,
         per_instance_cells);
    verdict(6, monotone && co_best, "median cost non-increasing in T for every method, CO median <= every baseline");
}

void criterion_adam(const SuiteResults& r) {
    double worst_gap = 0.0;
    for (std::size_t i = 0; i < r.adam_cost.size(); ++i)
        worst_gap = std::max(worst_gap, (r.adam_cost[i] - r.greedy_cost[i]) / r.greedy_cost[i]);
    const double ratio = static_cast<double>(r.adam_evals) / static_cast<double>(r.greedy_evals);
    info("T = %d from CH: worst Adam cost excess %.3f%%, evaluations %ld vs %ld (ratio %.3f, worst instance %.3f)",
         kAdamT, 100.0 * worst_gap, r.adam_evals, r.greedy_evals, ratio,
         *std::max_element(r.eval_ratio.begin(), r.eval_ratio.end()));
    verdict(8, worst_gap <= 0.01 && 3 * r.adam_evals <= r.greedy_evals,
            "Adam within 1% of greedy on every instance using <= 1/3 of its evaluations");
}

void adam_info_other_T() {
    // The same comparison at the neighbouring resolutions, on the first five days.
    auto suite = corpus::duck_suite(5, kSuiteSeed);
    for (int T : {6, 24}) {
        long ge = 0, ae = 0;
        double worst = 0.0;
        for (const auto& inst : suite) {
            auto ctx = make_context(inst.fleet, inst.actual, inst.actual);
            auto start = ch_partition(ctx, T);
            auto gr = greedy_optimize(ctx, start);
            auto ad = adam_optimize(ctx, start);
            ge += gr.evaluations;
            ae += ad.evaluations;
            worst = std::max(worst, (ad.cost - gr.cost) / gr.cost);
        }
        info("T = %d on 5 days: worst Adam cost excess %.3f%%, evaluation ratio %.3f", T, 100.0 * worst,
             static_cast<double>(ae) / static_cast<double>(ge));
    }
}

// ---------------------------------------------------------------------------

void criterion_cap_crossing() {
    auto inst = corpus::cap_crossing_instance();
    auto ctx = make_context(inst.fleet, inst.actual, inst.actual);
    auto ch = baseline_ch(ctx, kDominanceT);
    auto ta = baseline_ta(ctx, kDominanceT);
    auto co = greedy_optimize(ctx, ta.partition);
    const auto& a = inst.actual.values;
    const auto& rt = ch.eval.rt_schedule;
    int spikes = 0;
    for (std::size_t k = 1; k < rt.columns(); ++k) {
        if (a[k] <= corpus::kBaseloadCap) continue;
        bool crossed = false;
        for (std::size_t j = k >= 6 ? k - 6 : 0; j < k; ++j) crossed = crossed || a[j] <= corpus::kBaseloadCap;
        double su = 0.0;
        for (const auto& row : rt.startup) su += row[k];
        if (crossed && su > 0.0) {
            if (spikes == 0)
                info("CH start-up of %.0f EUR at interval %zu (%.1f MW, cap %.0f MW)", su, k, a[k], corpus::kBaseloadCap);
            ++spikes;
        }
    }
    info("%d CH start-up spikes across the cap; totals CH %.1f, TA %.1f, CO %.1f", spikes, ch.eval.rt_cost,
         ta.eval.rt_cost, co.cost);
    verdict(5, spikes >= 1 && strictly_lower(co.cost, ta.eval.rt_cost, 1e-9),
            "cap-crossing day: CH start-up spike at the cap and CO strictly below TA");
}

struct WarmColdMedians {
    double cold_it, warm_it, cold_cost, warm_cost;
    int fixed_points;
};

WarmColdMedians warm_vs_cold(int days, double noise_mw, std::vector<SearchResult>* keep) {
    auto suite = corpus::noisy_forecast_suite(days, kNoisySeed, noise_mw);
    std::vector<double> cold_it, warm_it, cold_cost, warm_cost;
    int fixed = 0;
    for (const auto& inst : suite) {
        auto online = make_context(inst.fleet, inst.actual, inst.actual);
        auto offline = make_context(inst.fleet, inst.forecast, inst.forecast);
        auto cold = adam_optimize(online, ta_partition(online, kDominanceT));
        auto pre = warm_start_offline(offline, kDominanceT);
        auto warm = online_refine(online, pre.final);
        cold_it.push_back(cold.iterations);
        warm_it.push_back(warm.iterations);
        cold_cost.push_back(cold.cost);
        warm_cost.push_back(warm.cost);
        fixed += warm.iterations == 1;
        if (keep) {
            keep->push_back(std::move(cold));
            keep->push_back(std::move(pre));
            keep->push_back(std::move(warm));
        }
    }
    return {median(cold_it), median(warm_it), median(cold_cost), median(warm_cost), fixed};
}

void criterion_warm_start(std::vector<SearchResult>& adam_runs) {
    auto m = warm_vs_cold(20, 20.0, &adam_runs);
    info("T = %d, 20 days, 20 MW forecast error: median online iterations cold %.1f, warm %.1f; "
         "warm already converged on %d; median final cost cold %.1f, warm %.1f",
         kDominanceT, m.cold_it, m.warm_it, m.fixed_points, m.cold_cost, m.warm_cost);
    verdict(7, m.warm_it <= 0.5 * m.cold_it, "warm start needs at most half the median online iterations of a cold start");
    auto low = warm_vs_cold(8, 5.0, &adam_runs);
    info("same check on 8 days with 5 MW forecast error: cold %.1f, warm %.1f, warm already converged on %d",
         low.cold_it, low.warm_it, low.fixed_points);
}

void criterion_descent(const SuiteResults& r, const std::vector<SearchResult>& extra_adam) {
    int greedy_bad = 0, adam_bad = 0, not_converged = 0, max_it = 0;
    for (const auto& g : r.greedy_runs) {
        greedy_bad += !g.trace.non_increasing();
        not_converged += !(g.converged && g.iterations <= 50);
        max_it = std::max(max_it, g.iterations);
    }
    std::size_t adam_count = 0;
    for (const auto* runs : {&r.adam_runs, &extra_adam})
        for (const auto& a : *runs) {
            adam_bad += !a.trace.non_increasing();
            ++adam_count;
        }
    info("%zu greedy traces, %zu Adam traces; increases %d / %d; greedy not converged %d, max iterations %d",
         r.greedy_runs.size(), adam_count, greedy_bad, adam_bad, not_converged, max_it);
    verdict(3, greedy_bad == 0 && adam_bad == 0 && not_converged == 0,
            "every trace non-increasing, greedy converges within 50 iterations");
}

void criterion_stochastic() {
    auto suite = corpus::duck_suite(10, 4040);
    int agree = 0;
    double worst = 0.0;
    std::mt19937_64 g(404);
    for (const auto& inst : suite) {
        auto det = make_context(inst.fleet, inst.actual, inst.actual);
        auto prob = make_context(inst.fleet, inst.actual, ScenarioSet{{inst.actual}});
        bool ok = true;
        for (const auto& p : {ta_partition(det, 12), random_partition(g, 8, 144)}) {
            const double a = evaluate_partition(det, p).rt_cost;
            const double b = evaluate_partition(prob, p).rt_cost;
            const double rel = std::abs(a - b) / std::max(1.0, std::abs(a));
            worst = std::max(worst, rel);
            ok = ok && rel <= 1e-6;
        }
        agree += ok;
    }
    info("worst relative gap %.3g over 20 evaluations", worst);
    verdict(9, agree == 10, "single-scenario probabilistic mode equals deterministic mode on 10 instances");
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_determinism() {
    const auto root = std::filesystem::temp_directory_path() / "costres_acceptance_determinism";
    std::filesystem::remove_all(root);
    RunConfig cfg;
    cfg.method = Method::co_greedy;
    cfg.T = 12;
    cfg.seed = 11;
    std::vector<std::string> results, traces;
    for (unsigned threads : {1u, 1u, 0u, 8u}) {
        cfg.threads = threads;
        cfg.out_dir = (root / ("run" + std::to_string(results.size()))).string();
        cmd_run(cfg);
        results.push_back(slurp(std::filesystem::path(cfg.out_dir) / "result.json"));
        traces.push_back(slurp(std::filesystem::path(cfg.out_dir) / "trace.csv"));
    }
    bool same = !results.front().empty();
    for (std::size_t k = 1; k < results.size(); ++k) same = same && results[k] == results[0] && traces[k] == traces[0];
    info("4 runs (threads 1, 1, all cores = %u, 8): result.json %zu bytes, trace.csv %zu bytes", worker_count(0),
         results[0].size(), traces[0].size());
    verdict(10, same, "cmd_run output byte-identical across repeats and thread counts");
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    try {
        criterion_oracle();
        criterion_anchor();
        criterion_cap_crossing();
        criterion_stochastic();
        criterion_determinism();
        auto suite = run_suite();
        criterion_dominance(suite);
        criterion_trend(suite);
        criterion_adam(suite);
        adam_info_other_T();
        std::vector<SearchResult> warm_runs;
        criterion_warm_start(warm_runs);
        criterion_descent(suite, warm_runs);
    } catch (const std::exception& e) {
        std::printf("acceptance aborted: %s\n", e.what());
        for (int id = 1; id <= 10; ++id)
            if (!verdicts.count(id)) verdicts[id] = {false, "not evaluated (run aborted)"};
    }
    int failures = 0;
    for (int id = 1; id <= 10; ++id) {
        auto it = verdicts.find(id);
        const bool pass = it != verdicts.end() && it->second.first;
        std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id,
                    it == verdicts.end() ? "not evaluated" : it->second.second.c_str());
        failures += !pass;
    }
    std::printf("acceptance: %d of 10 criteria passed in %.0f s\n", 10 - failures, seconds_since(t0));
    return failures;
}
