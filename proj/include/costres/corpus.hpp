#pragma once

// Reproducible synthetic instances: a three-class fleet, a duck-curve suite, the
// cap-crossing instance and a noisy-forecast suite for warm-start runs.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "costres/model.hpp"

namespace costres::corpus {

struct Instance {
    std::string name;
    Fleet fleet;
    NetLoadSeries actual;
    NetLoadSeries forecast;  // issued 48 h ahead; equals `actual` unless noise was added
};

inline constexpr double kBaseloadCap = 800.0;

/// One baseload, one intermediate and one peaking unit. The baseload unit starts on at
/// `initial_load` (within its limits). The intermediate unit starts on at minimum output
/// when the load exceeds the baseload cap by that much; above its minimum it could not
/// follow a day-ahead stop in the first real-time interval.
inline Fleet default_fleet(double initial_load) {
    Fleet f;
    f.shed_cost = 3000.0;
    f.spill_cost = 50.0;
    //            id    class                    pmin  pmax  RU    RD    MU  MD   C     SU       SD
    f.units.push_back({"B1", UnitClass::baseload, 300, kBaseloadCap, 200, 200, 8, 8, 20, 20000, 0, true, 0, 24});
    f.units.push_back({"I1", UnitClass::intermediate, 100, 400, 300, 300, 3, 2, 45, 3000, 0, false, 0, 24});
    f.units.push_back({"P1", UnitClass::peaking, 0, 500, 3000, 3000, 0, 0, 120, 800, 0, false, 0, 24});
    auto& b = f.units[0];
    auto& i = f.units[1];
    b.init_power = std::clamp(initial_load, b.p_min, b.p_max);
    if (initial_load >= b.p_max + i.p_min) {
        i.init_on = true;
        i.init_power = i.p_min;
    }
    return f;
}

namespace detail {

// Uniform draw in [lo, hi) from the top 53 bits, identical on every standard library.
inline double uniform(std::mt19937_64& g, double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(g() >> 11) * (1.0 / 9007199254740992.0);
}

inline Instance make(std::string name, const ProfileParams& p, std::uint64_t seed) {
    auto series = synth_netload(p, seed);
    return {std::move(name), default_fleet(series.values.front()), series, series};
}

}  // namespace detail

/// Duck-curve days with random level, swing, solar depth and noise.
inline std::vector<Instance> duck_suite(int count, std::uint64_t seed) {
    std::mt19937_64 g(seed);
    std::vector<Instance> out;
    for (int k = 0; k < count; ++k) {
        ProfileParams p;
        p.base_mw = detail::uniform(g, 980.0, 1040.0);
        p.amplitude_mw = detail::uniform(g, 250.0, 320.0);
        p.solar_depth = detail::uniform(g, 0.8, 1.3);
        p.noise_mw = detail::uniform(g, 10.0, 30.0);
        out.push_back(detail::make("duck-" + std::to_string(k), p, g()));
    }
    return out;
}

/// Net load oscillating around the baseload cap for eight hours in the middle of a duck day.
inline Instance cap_crossing_instance() {
    ProfileParams p;
    p.base_mw = 1000.0;
    p.amplitude_mw = 280.0;
    p.cap_crossing = CapCrossing{kBaseloadCap, 40.0, 54, 48, 8};
    return detail::make("cap-crossing", p, 1);
}

/// Duck days whose 48-h-ahead forecast carries extra AR(1) error of `noise_mw` scale.
inline std::vector<Instance> noisy_forecast_suite(int count, std::uint64_t seed, double noise_mw = 20.0) {
    auto days = duck_suite(count, seed);
    std::mt19937_64 g(seed ^ 0x9e3779b97f4a7c15ULL);
    for (auto& d : days) {
        ProfileParams err;
        err.base_mw = 0.0;
        err.noise_mw = noise_mw;
        err.N = static_cast<int>(d.actual.size());
        err.step_minutes = d.actual.step_minutes;
        auto e = synth_netload(err, g());
        for (std::size_t i = 0; i < d.forecast.values.size(); ++i) d.forecast.values[i] += e.values[i];
        d.name = "noisy-" + d.name;
    }
    return days;
}

}  // namespace costres::corpus
