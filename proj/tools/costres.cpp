// costres: cost-oriented temporal resolution for day-ahead unit commitment.
//
//   costres run     --config day.cfg --method co-greedy --T 24 --out out/
//   costres compare --config day.cfg
//   costres sweep   --config day.cfg
//   costres trace   --config day.cfg --warm-start

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "costres/cli.hpp"

namespace {

struct Flags {
    std::string config;
    std::optional<std::string> method;
    std::optional<int> T;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<unsigned> threads;
    bool warm_start = false;
    bool lp = false;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "flat key = value run configuration")->required();
    cmd->add_option("--method", f.method, "ch | na | ta | co-greedy | co-adam");
    cmd->add_option("--T", f.T, "number of day-ahead periods");
    cmd->add_option("--seed", f.seed, "seed for synthetic inputs");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--threads", f.threads, "workers per search sweep (0: all cores)");
}

costres::RunConfig resolve(const Flags& f) {
    auto cfg = costres::load_config(f.config);
    if (f.method) cfg.method = costres::parse_method(*f.method);
    if (f.T) cfg.T = *f.T;
    if (f.seed) cfg.seed = *f.seed;
    if (f.out) cfg.out_dir = *f.out;
    if (f.threads) cfg.threads = *f.threads;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cost-oriented adaptive temporal resolution for day-ahead unit commitment"};
    app.require_subcommand(1);
    Flags f;
    auto* run = app.add_subcommand("run", "one method on one day: result.json, trace.csv, timing.json");
    auto* compare = app.add_subcommand("compare", "CH, NA, TA and CO on one day: compare.csv");
    auto* sweep = app.add_subcommand("sweep", "all methods over T_list: sweep.csv");
    auto* trace = app.add_subcommand("trace", "convergence traces: trace_cold.csv, trace_warm.csv");
    for (auto* c : {run, compare, sweep, trace}) add_common(c, f);
    run->add_flag("--warm-start", f.warm_start, "start the search from the offline forecast partition");
    run->add_flag("--lp", f.lp, "also write da.lp, the day-ahead model of the final partition");
    trace->add_flag("--warm-start", f.warm_start, "also emit the warm-start trace");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : costres::kExitConfig;
    }

    try {
        auto cfg = resolve(f);
        if (run->parsed()) {
            auto s = costres::cmd_run(cfg, f.warm_start, f.lp);
            std::cout << costres::to_string(s.method) << " T=" << s.T << " total_eur=" << s.breakdown.total
                      << " iterations=" << s.iterations << " -> " << cfg.out_dir << "\n";
        } else if (compare->parsed()) {
            for (const auto& r : costres::cmd_compare(cfg))
                std::cout << r.method << " total_eur=" << r.breakdown.total << " reduction_vs_ch_pct="
                          << r.reduction_vs_ch_pct << "\n";
        } else if (sweep->parsed()) {
            auto rows = costres::cmd_sweep(cfg);
            std::cout << rows.size() << " rows -> " << cfg.out_dir << "/sweep.csv\n";
        } else {
            auto pair = costres::cmd_trace(cfg, f.warm_start);
            std::cout << "cold " << pair.cold.size() << " entries";
            if (f.warm_start) std::cout << ", warm " << pair.warm.size() << " entries";
            std::cout << " -> " << cfg.out_dir << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "costres: " << e.what() << "\n";
        return costres::exit_code_for(e);
    }
    return costres::kExitOk;
}
