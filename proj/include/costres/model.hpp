#pragma once

// Fleet and net-load data model, CSV ingestion, synthetic net-load generation
// and demand aggregation onto a time partition.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "costres/error.hpp"
#include "costres/partition.hpp"

namespace costres {

enum class UnitClass { baseload, intermediate, peaking };

inline std::string_view to_string(UnitClass c) {
    switch (c) {
    case UnitClass::baseload: return "baseload";
    case UnitClass::intermediate: return "intermediate";
    case UnitClass::peaking: return "peaking";
    }
    return "?";
}

inline std::optional<UnitClass> parse_unit_class(std::string_view s) {
    if (s == "baseload") return UnitClass::baseload;
    if (s == "intermediate") return UnitClass::intermediate;
    if (s == "peaking") return UnitClass::peaking;
    return std::nullopt;
}

struct UnitSpec {
    std::string id;
    UnitClass unit_class = UnitClass::peaking;
    double p_min = 0.0;          // MW
    double p_max = 0.0;          // MW
    double ramp_up = 0.0;        // MW/h
    double ramp_down = 0.0;      // MW/h
    double min_up = 0.0;         // h
    double min_down = 0.0;       // h
    double marginal_cost = 0.0;  // EUR/MWh
    double startup_cost = 0.0;   // EUR per start
    double shutdown_cost = 0.0;  // EUR per stop
    bool init_on = false;
    double init_power = 0.0;          // MW
    double init_hours_in_state = 0.0;  // h

    /// Throws InvariantError naming the unit and the offending field.
    void validate() const {
        auto fail = [&](const std::string& what) {
            throw InvariantError("unit '" + id + "': " + what);
        };
        if (id.empty()) throw InvariantError("unit with empty id");
        auto finite = [](double v) { return std::isfinite(v); };
        if (!finite(p_min) || !finite(p_max) || !finite(ramp_up) || !finite(ramp_down) ||
            !finite(min_up) || !finite(min_down) || !finite(marginal_cost) ||
            !finite(startup_cost) || !finite(shutdown_cost) || !finite(init_power) ||
            !finite(init_hours_in_state))
            fail("non-finite parameter");
        if (p_min < 0.0) fail("pmin_mw must be >= 0");
        if (p_min > p_max) fail("pmin_mw exceeds pmax_mw");
        if (ramp_up <= 0.0) fail("ramp_up_mw_per_h must be > 0");
        if (ramp_down <= 0.0) fail("ramp_down_mw_per_h must be > 0");
        if (min_up < 0.0) fail("min_up_h must be >= 0");
        if (min_down < 0.0) fail("min_down_h must be >= 0");
        if (marginal_cost < 0.0) fail("cost_eur_per_mwh must be >= 0");
        if (startup_cost < 0.0) fail("startup_eur must be >= 0");
        if (shutdown_cost < 0.0) fail("shutdown_eur must be >= 0");
        if (init_hours_in_state < 0.0) fail("init_hours must be >= 0");
        if (!init_on && init_power != 0.0) fail("init_p_mw must be 0 when init_on = 0");
        if (init_on && (init_power < p_min || init_power > p_max))
            fail("init_p_mw outside [pmin_mw, pmax_mw] while init_on = 1");
    }
};

struct Fleet {
    std::vector<UnitSpec> units;
    double shed_cost = 0.0;   // EUR/MWh of unserved net load
    double spill_cost = 0.0;  // EUR/MWh of generation above net load

    void validate() const {
        if (units.empty()) throw InvariantError("fleet has no units");
        if (!(spill_cost >= 0.0)) throw InvariantError("spill cost must be >= 0");
        std::set<std::string> ids;
        for (const auto& u : units) {
            u.validate();
            if (!ids.insert(u.id).second)
                throw InvariantError("duplicate unit id '" + u.id + "'");
            if (!(shed_cost > u.marginal_cost))
                throw InvariantError("shed cost must exceed the marginal cost of unit '" + u.id +
                                     "'");
        }
    }

    [[nodiscard]] double total_capacity() const {
        double s = 0.0;
        for (const auto& u : units) s += u.p_max;
        return s;
    }
};

struct NetLoadSeries {
    int step_minutes = 10;
    std::vector<double> values;  // MW

    [[nodiscard]] std::size_t size() const { return values.size(); }
    [[nodiscard]] int horizon_minutes() const {
        return step_minutes * static_cast<int>(values.size());
    }

    void validate() const {
        if (step_minutes <= 0) throw InvariantError("net-load step must be positive");
        if (values.empty()) throw InvariantError("net-load series is empty");
        for (std::size_t i = 0; i < values.size(); ++i)
            if (!std::isfinite(values[i]))
                throw InvariantError("non-finite net load at index " + std::to_string(i));
    }

    bool operator==(const NetLoadSeries&) const = default;
};

/// Equiprobable net-load scenarios of identical shape.
struct ScenarioSet {
    std::vector<NetLoadSeries> scenarios;

    void validate() const {
        if (scenarios.empty()) throw InvariantError("scenario set is empty");
        for (const auto& s : scenarios) {
            s.validate();
            if (s.step_minutes != scenarios.front().step_minutes ||
                s.size() != scenarios.front().size())
                throw InvariantError("scenarios differ in step or length");
        }
    }

    /// Pointwise mean over scenarios.
    [[nodiscard]] NetLoadSeries mean() const {
        validate();
        NetLoadSeries out{scenarios.front().step_minutes,
                          std::vector<double>(scenarios.front().size(), 0.0)};
        for (const auto& s : scenarios)
            for (std::size_t i = 0; i < s.size(); ++i) out.values[i] += s.values[i];
        for (auto& v : out.values) v /= static_cast<double>(scenarios.size());
        return out;
    }
};

namespace detail {

inline std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    for (auto& s : out) {
        auto b = s.find_first_not_of(" \t");
        auto e = s.find_last_not_of(" \t");
        s = (b == std::string::npos) ? std::string{} : s.substr(b, e - b + 1);
    }
    return out;
}

inline bool is_blank(std::string_view line) {
    return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

// Parses a double; accepts "nan"/"inf" so the caller can report them as non-finite.
inline std::optional<double> parse_double(std::string_view s) {
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::optional<long long> parse_int(std::string_view s) {
    if (s.empty()) return std::nullopt;
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::string where(std::size_t row, std::size_t col) {
    return "row " + std::to_string(row) + ", column " + std::to_string(col);
}

// Shortest text that parses back to exactly the same double.
inline std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

}  // namespace detail

inline constexpr std::string_view kFleetHeader =
    "id,class,pmin_mw,pmax_mw,ramp_up_mw_per_h,ramp_down_mw_per_h,min_up_h,min_down_h,"
    "cost_eur_per_mwh,startup_eur,shutdown_eur,init_on,init_p_mw,init_hours";

inline constexpr std::string_view kNetLoadHeader = "interval_index,net_load_mw";

/// Parses the fleet CSV. Rows and columns in messages are 1-based, the header is row 1.
inline Fleet parse_fleet(std::istream& in, double shed_cost) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("fleet file is empty (header required)");
    auto header = detail::split_csv(line);
    auto expected = detail::split_csv(kFleetHeader);
    if (header != expected)
        throw ParseError("fleet header mismatch; expected '" + std::string(kFleetHeader) + "'");

    Fleet fleet;
    fleet.shed_cost = shed_cost;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (detail::is_blank(line)) continue;
        auto f = detail::split_csv(line);
        if (f.size() != expected.size())
            throw ParseError("row " + std::to_string(row) + ": expected " +
                             std::to_string(expected.size()) + " fields, got " +
                             std::to_string(f.size()));
        UnitSpec u;
        u.id = f[0];
        if (u.id.empty()) throw ParseError(detail::where(row, 1) + ": empty id");
        auto cls = parse_unit_class(f[1]);
        if (!cls) throw ParseError(detail::where(row, 2) + ": unknown class '" + f[1] + "'");
        u.unit_class = *cls;
        std::array<double*, 9> num{&u.p_min,  &u.p_max,         &u.ramp_up,
                                   &u.ramp_down, &u.min_up,     &u.min_down,
                                   &u.marginal_cost, &u.startup_cost, &u.shutdown_cost};
        for (std::size_t k = 0; k < num.size(); ++k) {
            auto v = detail::parse_double(f[2 + k]);
            if (!v) throw ParseError(detail::where(row, 3 + k) + ": not a number '" + f[2 + k] + "'");
            *num[k] = *v;
        }
        if (f[11] == "0") {
            u.init_on = false;
        } else if (f[11] == "1") {
            u.init_on = true;
        } else {
            throw ParseError(detail::where(row, 12) + ": init_on must be 0 or 1");
        }
        auto ip = detail::parse_double(f[12]);
        if (!ip) throw ParseError(detail::where(row, 13) + ": not a number '" + f[12] + "'");
        u.init_power = *ip;
        auto ih = detail::parse_double(f[13]);
        if (!ih) throw ParseError(detail::where(row, 14) + ": not a number '" + f[13] + "'");
        u.init_hours_in_state = *ih;
        fleet.units.push_back(std::move(u));
    }
    fleet.validate();
    return fleet;
}

inline Fleet load_fleet(const std::string& path, double shed_cost) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open fleet file '" + path + "'");
    return parse_fleet(in, shed_cost);
}

inline void write_fleet(std::ostream& out, const Fleet& fleet) {
    out << kFleetHeader << '\n';
    for (const auto& u : fleet.units) {
        using detail::format_double;
        out << u.id << ',' << to_string(u.unit_class) << ',' << format_double(u.p_min) << ','
            << format_double(u.p_max) << ',' << format_double(u.ramp_up) << ','
            << format_double(u.ramp_down) << ',' << format_double(u.min_up) << ','
            << format_double(u.min_down) << ',' << format_double(u.marginal_cost) << ','
            << format_double(u.startup_cost) << ',' << format_double(u.shutdown_cost) << ','
            << (u.init_on ? 1 : 0) << ',' << format_double(u.init_power) << ','
            << format_double(u.init_hours_in_state) << '\n';
    }
}

inline NetLoadSeries parse_netload(std::istream& in, int step_minutes) {
    std::string line;
    if (!std::getline(in, line)) throw InvariantError("net-load series is empty");
    if (detail::split_csv(line) != detail::split_csv(kNetLoadHeader))
        throw ParseError("net-load header mismatch; expected '" + std::string(kNetLoadHeader) + "'");
    NetLoadSeries s;
    s.step_minutes = step_minutes;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (detail::is_blank(line)) continue;
        auto f = detail::split_csv(line);
        if (f.size() != 2)
            throw ParseError("row " + std::to_string(row) + ": expected 2 fields");
        auto idx = detail::parse_int(f[0]);
        if (!idx) throw ParseError(detail::where(row, 1) + ": bad interval index '" + f[0] + "'");
        if (*idx != static_cast<long long>(s.values.size()))
            throw ParseError(detail::where(row, 1) + ": interval index " + f[0] +
                             " breaks 0-based contiguity (expected " +
                             std::to_string(s.values.size()) + ")");
        auto v = detail::parse_double(f[1]);
        if (!v) throw ParseError(detail::where(row, 2) + ": not a number '" + f[1] + "'");
        if (!std::isfinite(*v))
            throw InvariantError("non-finite net load at index " + std::to_string(*idx));
        s.values.push_back(*v);
    }
    s.validate();
    return s;
}

inline NetLoadSeries load_netload_csv(const std::string& path, int step_minutes) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open net-load file '" + path + "'");
    return parse_netload(in, step_minutes);
}

inline void write_netload(std::ostream& out, const NetLoadSeries& s) {
    out << kNetLoadHeader << '\n';
    for (std::size_t i = 0; i < s.values.size(); ++i)
        out << i << ',' << detail::format_double(s.values[i]) << '\n';
}

inline void write_netload_csv(const std::string& path, const NetLoadSeries& s) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    write_netload(out, s);
}

// ---------------------------------------------------------------------------
// Synthetic net load

struct CapCrossing {
    double cap_mw = 800.0;
    double oscillation_mw = 15.0;
    int start_interval = 0;
    int length_intervals = -1;  // -1: to the end of the series
    int period_intervals = 8;
};

struct RampSpike {
    double magnitude_mw = 0.0;
    int at_interval = 1;
};

struct ProfileParams {
    double base_mw = 800.0;
    double amplitude_mw = 0.0;
    /// Depth of the midday solar trough relative to the demand swing (duck shape).
    double solar_depth = 1.0;
    std::optional<CapCrossing> cap_crossing;
    std::optional<RampSpike> ramp_spike;
    double noise_mw = 0.0;
    int N = 144;
    int step_minutes = 10;
};

namespace detail {

// Demand with a morning shoulder and evening peak minus a midday solar bell.
inline double duck_raw(double hour, double solar_depth) {
    const double two_pi = 2.0 * std::numbers::pi;
    double load = 0.55 + 0.25 * std::cos(two_pi * (hour - 19.0) / 24.0) +
                  0.10 * std::exp(-0.5 * (hour - 8.0) * (hour - 8.0));
    double solar = 0.6 * solar_depth * std::exp(-((hour - 13.0) / 2.6) * ((hour - 13.0) / 2.6));
    return load - solar;
}

struct DuckRange {
    double lo = 0.0, hi = 0.0;
};

inline DuckRange duck_range(double solar_depth) {
    DuckRange r{1e300, -1e300};
    for (int k = 0; k < 24 * 60; ++k) {
        double v = duck_raw(k / 60.0, solar_depth);
        r.lo = std::min(r.lo, v);
        r.hi = std::max(r.hi, v);
    }
    return r;
}

// Shape normalized to [-1, 1] over a day.
inline double duck_shape(double hour, double solar_depth, const DuckRange& r) {
    double h = std::fmod(hour, 24.0);
    if (r.hi - r.lo < 1e-12) return 0.0;
    return 2.0 * (duck_raw(h, solar_depth) - r.lo) / (r.hi - r.lo) - 1.0;
}

// Standard normal draws from a fixed bit generator (Box-Muller), identical on every platform.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : gen_(seed) {}
    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    double uniform() {
        // 53 random bits in (0, 1].
        return (static_cast<double>(gen_() >> 11) + 1.0) * (1.0 / 9007199254740992.0);
    }
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace detail

/// Deterministic synthetic net load for a given (params, seed).
inline NetLoadSeries synth_netload(const ProfileParams& p, std::uint64_t seed) {
    if (p.N < 1) throw InvariantError("synthetic profile needs N >= 1");
    if (p.step_minutes <= 0) throw InvariantError("synthetic profile needs a positive step");
    if (p.amplitude_mw < 0.0 || p.noise_mw < 0.0)
        throw InvariantError("synthetic magnitudes must be >= 0");
    NetLoadSeries s{p.step_minutes, std::vector<double>(static_cast<std::size_t>(p.N))};
    detail::NormalStream normal(seed);
    const auto range = detail::duck_range(p.solar_depth);
    double ar = 0.0;
    for (int i = 0; i < p.N; ++i) {
        double hour = (i + 0.5) * p.step_minutes / 60.0;
        double v = p.base_mw;
        if (p.amplitude_mw > 0.0) v += p.amplitude_mw * detail::duck_shape(hour, p.solar_depth, range);
        if (p.noise_mw > 0.0) {
            ar = 0.6 * ar + 0.8 * normal.next();  // AR(1) with unit stationary variance
            v += p.noise_mw * ar;
        }
        s.values[static_cast<std::size_t>(i)] = v;
    }
    if (p.cap_crossing) {
        const auto& c = *p.cap_crossing;
        if (c.oscillation_mw <= 0.0 || c.period_intervals < 2)
            throw InvariantError("cap crossing needs a positive oscillation and period >= 2");
        int begin = std::clamp(c.start_interval, 0, p.N);
        int end = c.length_intervals < 0 ? p.N : std::min(p.N, begin + c.length_intervals);
        if (end - begin < 2) throw InvariantError("cap crossing window needs >= 2 intervals");
        for (int i = begin; i < end; ++i) {
            double phase = 2.0 * std::numbers::pi * ((i - begin) + 0.5) / c.period_intervals;
            s.values[static_cast<std::size_t>(i)] = c.cap_mw + c.oscillation_mw * std::sin(phase);
        }
        // A window shorter than half a period may miss one side; force both.
        auto lo = std::min_element(s.values.begin() + begin, s.values.begin() + end);
        auto hi = std::max_element(s.values.begin() + begin, s.values.begin() + end);
        if (*lo >= c.cap_mw) *lo = c.cap_mw - c.oscillation_mw;
        if (*hi <= c.cap_mw) *hi = c.cap_mw + c.oscillation_mw;
    }
    if (p.ramp_spike) {
        const auto& r = *p.ramp_spike;
        if (r.magnitude_mw < 0.0) throw InvariantError("ramp spike magnitude must be >= 0");
        if (r.at_interval < 1 || r.at_interval >= p.N)
            throw InvariantError("ramp spike interval must lie in [1, N)");
        auto at = static_cast<std::size_t>(r.at_interval);
        double shift = r.magnitude_mw - (s.values[at] - s.values[at - 1]);
        for (std::size_t i = at; i < s.values.size(); ++i) s.values[i] += shift;
    }
    return s;
}

/// Mean net load over the RT intervals covered by each non-empty period.
inline std::vector<double> aggregate_demand(const NetLoadSeries& series,
                                            const TimePartition& partition) {
    if (partition.horizon_minutes() != series.horizon_minutes())
        throw ShapeError("partition horizon " + std::to_string(partition.horizon_minutes()) +
                         " min does not match series horizon " +
                         std::to_string(series.horizon_minutes()) + " min");
    std::vector<double> out;
    int pos = 0;
    for (int len : partition.lengths()) {
        if (len == 0) continue;
        if (len % series.step_minutes != 0 || pos % series.step_minutes != 0)
            throw ShapeError("partition is not aligned to the series step");
        auto first = static_cast<std::size_t>(pos / series.step_minutes);
        auto count = static_cast<std::size_t>(len / series.step_minutes);
        double sum = 0.0;
        for (std::size_t i = first; i < first + count; ++i) sum += series.values[i];
        out.push_back(sum / static_cast<double>(count));
        pos += len;
    }
    return out;
}

}  // namespace costres
