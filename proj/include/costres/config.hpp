#pragma once

// Flat key = value run configuration and the evaluation contexts it describes.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "costres/coordinator.hpp"
#include "costres/corpus.hpp"
#include "costres/error.hpp"
#include "costres/model.hpp"

namespace costres {

enum class Method { ch, na, ta, co_greedy, co_adam };

inline std::string_view to_string(Method m) {
    switch (m) {
        case Method::ch: return "ch";
        case Method::na: return "na";
        case Method::ta: return "ta";
        case Method::co_greedy: return "co-greedy";
        case Method::co_adam: return "co-adam";
    }
    return "?";
}

inline Method parse_method(std::string_view s) {
    for (auto m : {Method::ch, Method::na, Method::ta, Method::co_greedy, Method::co_adam})
        if (to_string(m) == s) return m;
    throw ConfigError("unknown method '" + std::string(s) + "' (ch, na, ta, co-greedy, co-adam)");
}

struct RunConfig {
    // Inputs. An empty fleet_path selects the built-in three-unit fleet; an empty
    // netload_path selects the synthetic duck day below.
    std::string fleet_path;
    std::string netload_path;
    std::string forecast_path;
    int step_minutes = 10;
    double shed_cost = 3000.0;
    double spill_cost = 50.0;

    double synth_base_mw = 1000.0;
    double synth_amplitude_mw = 280.0;
    double synth_solar_depth = 1.0;
    double synth_noise_mw = 20.0;
    int synth_intervals = 144;
    /// Extra AR(1) error on the synthetic forecast; ignored when forecast_path is set.
    double forecast_noise_mw = 0.0;

    /// 0 runs the deterministic day-ahead stage; k > 0 runs it on k scenarios.
    int scenario_count = 0;
    double scenario_noise_mw = 20.0;

    Method method = Method::co_greedy;
    int T = 24;
    std::vector<int> T_list{1, 2, 3, 6, 12, 24};
    int grid_minutes = 10;
    int max_iter = 50;
    AdamParams adam;
    std::uint64_t seed = 1;
    unsigned threads = 1;  // 0: one per hardware thread
    std::string out_dir = "out";

    void validate() const {
        if (step_minutes <= 0) throw ConfigError("step_minutes must be > 0");
        if (grid_minutes <= 0) throw ConfigError("grid_minutes must be > 0");
        if (T < 1) throw ConfigError("T must be >= 1");
        if (T_list.empty()) throw ConfigError("T_list is empty");
        for (int t : T_list)
            if (t < 1) throw ConfigError("T_list entries must be >= 1");
        if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
        if (scenario_count < 0) throw ConfigError("scenario_count must be >= 0");
        if (synth_intervals < 1) throw ConfigError("synth_intervals must be >= 1");
        if (!(shed_cost > 0.0)) throw ConfigError("shed_cost must be > 0");
        if (!(spill_cost >= 0.0)) throw ConfigError("spill_cost must be >= 0");
        if (!(synth_noise_mw >= 0.0) || !(forecast_noise_mw >= 0.0) || !(scenario_noise_mw >= 0.0))
            throw ConfigError("noise scales must be >= 0");
        try {
            adam.validate();
        } catch (const InvariantError& e) {
            throw ConfigError(e.what());
        }
        for (const auto* path : {&fleet_path, &netload_path, &forecast_path})
            if (!path->empty() && !std::filesystem::exists(*path))
                throw ConfigError("file not found: '" + *path + "'");
    }
};

namespace detail {

inline std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <class T>
T config_number(const std::string& key, const std::string& v) {
    if constexpr (std::is_floating_point_v<T>) {
        auto d = parse_double(v);
        if (!d || !std::isfinite(*d)) throw ConfigError(key + ": not a finite number '" + v + "'");
        return static_cast<T>(*d);
    } else {
        auto i = parse_int(v);
        if (!i || *i < static_cast<long long>(std::numeric_limits<T>::min()) ||
            (*i > 0 && static_cast<unsigned long long>(*i) > std::numeric_limits<T>::max()))
            throw ConfigError(key + ": not an integer in range '" + v + "'");
        return static_cast<T>(*i);
    }
}

inline bool config_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError(key + ": expected true/false, got '" + v + "'");
}

}  // namespace detail

/// Applies one key/value pair; unknown keys are errors so typos do not pass silently.
inline void set_config_value(RunConfig& c, const std::string& key, const std::string& v) {
    using detail::config_number;
    if (key == "fleet_path") c.fleet_path = v;
    else if (key == "netload_path") c.netload_path = v;
    else if (key == "forecast_path") c.forecast_path = v;
    else if (key == "step_minutes") c.step_minutes = config_number<int>(key, v);
    else if (key == "shed_cost") c.shed_cost = config_number<double>(key, v);
    else if (key == "spill_cost") c.spill_cost = config_number<double>(key, v);
    else if (key == "synth_base_mw") c.synth_base_mw = config_number<double>(key, v);
    else if (key == "synth_amplitude_mw") c.synth_amplitude_mw = config_number<double>(key, v);
    else if (key == "synth_solar_depth") c.synth_solar_depth = config_number<double>(key, v);
    else if (key == "synth_noise_mw") c.synth_noise_mw = config_number<double>(key, v);
    else if (key == "synth_intervals") c.synth_intervals = config_number<int>(key, v);
    else if (key == "forecast_noise_mw") c.forecast_noise_mw = config_number<double>(key, v);
    else if (key == "scenario_count") c.scenario_count = config_number<int>(key, v);
    else if (key == "scenario_noise_mw") c.scenario_noise_mw = config_number<double>(key, v);
    else if (key == "method") c.method = parse_method(v);
    else if (key == "T") c.T = config_number<int>(key, v);
    else if (key == "T_list") {
        c.T_list.clear();
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ',')) c.T_list.push_back(config_number<int>(key, detail::trim(item)));
    }
    else if (key == "grid_minutes") c.grid_minutes = config_number<int>(key, v);
    else if (key == "max_iter") c.max_iter = config_number<int>(key, v);
    else if (key == "adam_alpha") c.adam.alpha = config_number<double>(key, v);
    else if (key == "adam_beta1") c.adam.beta1 = config_number<double>(key, v);
    else if (key == "adam_beta2") c.adam.beta2 = config_number<double>(key, v);
    else if (key == "adam_epsilon") c.adam.epsilon = config_number<double>(key, v);
    else if (key == "adam_literal_sign") c.adam.literal_sign = detail::config_bool(key, v);
    else if (key == "seed") c.seed = config_number<std::uint64_t>(key, v);
    else if (key == "threads") c.threads = config_number<unsigned>(key, v);
    else if (key == "out_dir") c.out_dir = v;
    else throw ConfigError("unknown config key '" + key + "'");
}

/// Reads `key = value` lines; `#` starts a comment, blank lines are skipped.
/// Relative paths are resolved against `base_dir`.
inline RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {}) {
    RunConfig c;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (detail::is_blank(line)) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(row) + ": expected key = value");
        auto key = detail::trim(std::string_view(line).substr(0, eq));
        auto value = detail::trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(row) + ": empty key");
        try {
            set_config_value(c, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(row) + ": " + e.what());
        }
    }
    if (!base_dir.empty())
        for (auto* path : {&c.fleet_path, &c.netload_path, &c.forecast_path})
            if (!path->empty() && std::filesystem::path(*path).is_relative()) *path = (base_dir / *path).string();
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in, std::filesystem::path(path).parent_path());
}

/// Serializes every field in the format parse_config reads.
inline void write_config(std::ostream& out, const RunConfig& c) {
    using detail::format_double;
    out << "fleet_path = " << c.fleet_path << '\n'
        << "netload_path = " << c.netload_path << '\n'
        << "forecast_path = " << c.forecast_path << '\n'
        << "step_minutes = " << c.step_minutes << '\n'
        << "shed_cost = " << format_double(c.shed_cost) << '\n'
        << "spill_cost = " << format_double(c.spill_cost) << '\n'
        << "synth_base_mw = " << format_double(c.synth_base_mw) << '\n'
        << "synth_amplitude_mw = " << format_double(c.synth_amplitude_mw) << '\n'
        << "synth_solar_depth = " << format_double(c.synth_solar_depth) << '\n'
        << "synth_noise_mw = " << format_double(c.synth_noise_mw) << '\n'
        << "synth_intervals = " << c.synth_intervals << '\n'
        << "forecast_noise_mw = " << format_double(c.forecast_noise_mw) << '\n'
        << "scenario_count = " << c.scenario_count << '\n'
        << "scenario_noise_mw = " << format_double(c.scenario_noise_mw) << '\n'
        << "method = " << to_string(c.method) << '\n'
        << "T = " << c.T << '\n'
        << "T_list = ";
    for (std::size_t i = 0; i < c.T_list.size(); ++i) out << (i ? "," : "") << c.T_list[i];
    out << '\n'
        << "grid_minutes = " << c.grid_minutes << '\n'
        << "max_iter = " << c.max_iter << '\n'
        << "adam_alpha = " << format_double(c.adam.alpha) << '\n'
        << "adam_beta1 = " << format_double(c.adam.beta1) << '\n'
        << "adam_beta2 = " << format_double(c.adam.beta2) << '\n'
        << "adam_epsilon = " << format_double(c.adam.epsilon) << '\n'
        << "adam_literal_sign = " << (c.adam.literal_sign ? "true" : "false") << '\n'
        << "seed = " << c.seed << '\n'
        << "threads = " << c.threads << '\n'
        << "out_dir = " << c.out_dir << '\n';
}

// ---------------------------------------------------------------------------
// Inputs described by a config

struct RunInputs {
    Fleet fleet;
    NetLoadSeries actual;
    NetLoadSeries forecast;
    std::optional<ScenarioSet> scenarios;
};

namespace detail {

// Independent seeds for the actual series, forecast error and each scenario.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline NetLoadSeries with_noise(NetLoadSeries s, double noise_mw, std::uint64_t seed) {
    if (noise_mw <= 0.0) return s;
    ProfileParams err;
    err.base_mw = 0.0;
    err.noise_mw = noise_mw;
    err.N = static_cast<int>(s.size());
    err.step_minutes = s.step_minutes;
    auto e = synth_netload(err, seed);
    for (std::size_t i = 0; i < s.values.size(); ++i) s.values[i] += e.values[i];
    return s;
}

}  // namespace detail

inline RunInputs load_inputs(const RunConfig& c) {
    c.validate();
    RunInputs in;
    if (c.netload_path.empty()) {
        ProfileParams p;
        p.base_mw = c.synth_base_mw;
        p.amplitude_mw = c.synth_amplitude_mw;
        p.solar_depth = c.synth_solar_depth;
        p.noise_mw = c.synth_noise_mw;
        p.N = c.synth_intervals;
        p.step_minutes = c.step_minutes;
        in.actual = synth_netload(p, detail::derive_seed(c.seed, 0));
    } else {
        in.actual = load_netload_csv(c.netload_path, c.step_minutes);
    }
    if (!c.forecast_path.empty())
        in.forecast = load_netload_csv(c.forecast_path, c.step_minutes);
    else
        in.forecast = detail::with_noise(in.actual, c.forecast_noise_mw, detail::derive_seed(c.seed, 1));
    if (in.forecast.size() != in.actual.size())
        throw ConfigError("forecast has " + std::to_string(in.forecast.size()) + " intervals, actuals have " +
                          std::to_string(in.actual.size()));

    if (c.fleet_path.empty()) {
        in.fleet = corpus::default_fleet(in.actual.values.front());
        in.fleet.shed_cost = c.shed_cost;
    } else {
        in.fleet = load_fleet(c.fleet_path, c.shed_cost);
    }
    in.fleet.spill_cost = c.spill_cost;
    in.fleet.validate();

    if (c.scenario_count > 0) {
        ScenarioSet set;
        for (int k = 0; k < c.scenario_count; ++k)
            set.scenarios.push_back(detail::with_noise(in.actual, c.scenario_noise_mw,
                                                       detail::derive_seed(c.seed, 2 + static_cast<std::uint64_t>(k))));
        in.scenarios = std::move(set);
    }
    return in;
}

/// Context the day is scheduled and priced in: actuals on both stages, or scenarios on
/// the day-ahead stage when configured.
inline EvalContext online_context(const RunConfig& c, const RunInputs& in) {
    auto ctx = in.scenarios ? make_context(in.fleet, in.actual, *in.scenarios, c.grid_minutes)
                            : make_context(in.fleet, in.actual, in.actual, c.grid_minutes);
    ctx.threads = c.threads;
    return ctx;
}

/// Context of the earlier forecast, on which the warm-start partition is prepared.
inline EvalContext offline_context(const RunConfig& c, const RunInputs& in) {
    auto ctx = make_context(in.fleet, in.forecast, in.forecast, c.grid_minutes);
    ctx.threads = c.threads;
    return ctx;
}

}  // namespace costres
