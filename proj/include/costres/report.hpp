#pragma once

// Result files: trace, comparison and sweep CSVs with their parsers, and the JSON run
// summary. Numbers are written in shortest round-trip form so parsing returns the exact
// values that were written.

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "costres/config.hpp"
#include "costres/coordinator.hpp"
#include "costres/error.hpp"
#include "costres/model.hpp"
#include "costres/partition.hpp"
#include "costres/search.hpp"
#include "costres/uc.hpp"

namespace costres {

inline constexpr int kResultSchemaVersion = 1;

inline constexpr std::string_view kTraceHeader = "iteration,rt_cost_eur,partition";
inline constexpr std::string_view kCompareHeader =
    "method,start_stop_eur,op_baseload_eur,op_intermediate_eur,op_peaking_eur,shed_eur,total_eur,"
    "reduction_vs_ch_pct";
inline constexpr std::string_view kSweepHeader = "T,method,total_eur";

namespace detail {

inline void expect_header(std::istream& in, std::string_view header, const char* what) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(std::string(what) + " is empty (header required)");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header) throw ParseError(std::string(what) + " header mismatch; expected '" + std::string(header) + "'");
}

inline double csv_double(const std::string& s, std::size_t row, std::size_t col) {
    auto v = parse_double(s);
    if (!v) throw ParseError(where(row, col) + ": not a number '" + s + "'");
    return *v;
}

inline int csv_int(const std::string& s, std::size_t row, std::size_t col) {
    auto v = parse_int(s);
    if (!v || *v < std::numeric_limits<int>::min() || *v > std::numeric_limits<int>::max())
        throw ParseError(where(row, col) + ": not an integer '" + s + "'");
    return static_cast<int>(*v);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Trace CSV: the partition field is quoted because it is itself a comma list.

struct TraceRow {
    int iteration = 0;
    double rt_cost = 0.0;
    TimePartition partition;

    bool operator==(const TraceRow&) const = default;
};

inline std::vector<TraceRow> trace_rows(const Trace& trace) {
    std::vector<TraceRow> rows;
    for (const auto& e : trace.entries) rows.push_back({e.iteration, e.rt_cost, e.partition});
    return rows;
}

inline void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows) {
    out << kTraceHeader << '\n';
    for (const auto& r : rows)
        out << r.iteration << ',' << detail::format_double(r.rt_cost) << ",\"" << format_partition(r.partition)
            << "\"\n";
}

inline std::vector<TraceRow> parse_trace_csv(std::istream& in, int grid_minutes, int horizon_minutes) {
    detail::expect_header(in, kTraceHeader, "trace CSV");
    std::vector<TraceRow> rows;
    std::string line;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (detail::is_blank(line)) continue;
        if (line.back() == '\r') line.pop_back();
        auto c1 = line.find(',');
        auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c2 == std::string::npos) throw ParseError("row " + std::to_string(row) + ": expected 3 fields");
        std::string part = line.substr(c2 + 1);
        if (part.size() < 2 || part.front() != '"' || part.back() != '"')
            throw ParseError(detail::where(row, 3) + ": partition must be a quoted list");
        TraceRow r;
        r.iteration = detail::csv_int(line.substr(0, c1), row, 1);
        r.rt_cost = detail::csv_double(line.substr(c1 + 1, c2 - c1 - 1), row, 2);
        r.partition = parse_partition(std::string_view(part).substr(1, part.size() - 2), grid_minutes, horizon_minutes);
        if (r.iteration != static_cast<int>(rows.size()))
            throw ParseError(detail::where(row, 1) + ": iterations must count up from 0");
        rows.push_back(std::move(r));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Comparison CSV

struct CompareRow {
    std::string method;
    CostBreakdown breakdown;
    double reduction_vs_ch_pct = 0.0;
};

inline bool operator==(const CostBreakdown& a, const CostBreakdown& b) {
    return a.start_stop == b.start_stop && a.op_baseload == b.op_baseload && a.op_intermediate == b.op_intermediate &&
           a.op_peaking == b.op_peaking && a.shed == b.shed && a.total == b.total;
}

inline bool operator==(const CompareRow& a, const CompareRow& b) {
    return a.method == b.method && a.breakdown == b.breakdown && a.reduction_vs_ch_pct == b.reduction_vs_ch_pct;
}

/// Percent saved against the CH total; positive means cheaper.
inline double reduction_pct(double ch_total, double total) {
    return ch_total == 0.0 ? 0.0 : 100.0 * (ch_total - total) / ch_total;
}

inline void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows) {
    using detail::format_double;
    out << kCompareHeader << '\n';
    for (const auto& r : rows) {
        const auto& b = r.breakdown;
        out << r.method << ',' << format_double(b.start_stop) << ',' << format_double(b.op_baseload) << ','
            << format_double(b.op_intermediate) << ',' << format_double(b.op_peaking) << ','
            << format_double(b.shed) << ',' << format_double(b.total) << ',' << format_double(r.reduction_vs_ch_pct)
            << '\n';
    }
}

inline std::vector<CompareRow> parse_compare_csv(std::istream& in) {
    detail::expect_header(in, kCompareHeader, "comparison CSV");
    std::vector<CompareRow> rows;
    std::string line;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (detail::is_blank(line)) continue;
        auto f = detail::split_csv(line);
        if (f.size() != 8) throw ParseError("row " + std::to_string(row) + ": expected 8 fields");
        if (f[0].empty()) throw ParseError(detail::where(row, 1) + ": empty method");
        CompareRow r;
        r.method = f[0];
        auto& b = r.breakdown;
        double* cols[] = {&b.start_stop, &b.op_baseload, &b.op_intermediate, &b.op_peaking, &b.shed, &b.total,
                          &r.reduction_vs_ch_pct};
        for (std::size_t k = 0; k < 7; ++k) *cols[k] = detail::csv_double(f[k + 1], row, k + 2);
        rows.push_back(std::move(r));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Sweep CSV

struct SweepRow {
    int T = 0;
    std::string method;
    double total = 0.0;

    bool operator==(const SweepRow&) const = default;
};

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << kSweepHeader << '\n';
    for (const auto& r : rows) out << r.T << ',' << r.method << ',' << detail::format_double(r.total) << '\n';
}

inline std::vector<SweepRow> parse_sweep_csv(std::istream& in) {
    detail::expect_header(in, kSweepHeader, "sweep CSV");
    std::vector<SweepRow> rows;
    std::string line;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (detail::is_blank(line)) continue;
        auto f = detail::split_csv(line);
        if (f.size() != 3) throw ParseError("row " + std::to_string(row) + ": expected 3 fields");
        if (f[1].empty()) throw ParseError(detail::where(row, 2) + ": empty method");
        rows.push_back({detail::csv_int(f[0], row, 1), f[1], detail::csv_double(f[2], row, 3)});
    }
    return rows;
}

// ---------------------------------------------------------------------------
// JSON run summary. Wall time lives in a separate file so the summary is a pure
// function of config and seed.

struct RunSummary {
    Method method = Method::ch;
    Mode mode = Mode::deterministic;
    int T = 0;
    int grid_minutes = 10;
    std::uint64_t seed = 0;
    bool warm_start = false;
    TimePartition partition;
    CostBreakdown breakdown;
    int iterations = 0;
    long evaluations = 0;
    bool converged = true;
};

inline nlohmann::ordered_json breakdown_json(const CostBreakdown& b) {
    nlohmann::ordered_json j;
    j["start_stop_eur"] = b.start_stop;
    j["op_baseload_eur"] = b.op_baseload;
    j["op_intermediate_eur"] = b.op_intermediate;
    j["op_peaking_eur"] = b.op_peaking;
    j["shed_eur"] = b.shed;
    j["total_eur"] = b.total;
    return j;
}

inline nlohmann::ordered_json summary_json(const RunSummary& s) {
    nlohmann::ordered_json j;
    j["schema_version"] = kResultSchemaVersion;
    j["method"] = std::string(to_string(s.method));
    j["mode"] = std::string(to_string(s.mode));
    j["T"] = s.T;
    j["grid_minutes"] = s.grid_minutes;
    j["seed"] = s.seed;
    j["warm_start"] = s.warm_start;
    j["partition"] = s.partition.lengths();
    j["breakdown"] = breakdown_json(s.breakdown);
    j["iterations"] = s.iterations;
    j["evaluations"] = s.evaluations;
    j["converged"] = s.converged;
    return j;
}

inline RunSummary parse_summary_json(std::istream& in) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
        if (j.at("schema_version").get<int>() != kResultSchemaVersion)
            throw ParseError("unsupported result schema_version " + j.at("schema_version").dump());
        RunSummary s;
        s.method = parse_method(j.at("method").get<std::string>());
        auto mode = j.at("mode").get<std::string>();
        if (mode != "deterministic" && mode != "probabilistic") throw ParseError("unknown mode '" + mode + "'");
        s.mode = mode == "deterministic" ? Mode::deterministic : Mode::probabilistic;
        s.T = j.at("T").get<int>();
        s.grid_minutes = j.at("grid_minutes").get<int>();
        s.seed = j.at("seed").get<std::uint64_t>();
        s.warm_start = j.at("warm_start").get<bool>();
        s.partition = TimePartition(j.at("partition").get<std::vector<int>>(), s.grid_minutes);
        const auto& b = j.at("breakdown");
        s.breakdown = {b.at("start_stop_eur").get<double>(), b.at("op_baseload_eur").get<double>(),
                       b.at("op_intermediate_eur").get<double>(), b.at("op_peaking_eur").get<double>(),
                       b.at("shed_eur").get<double>(), b.at("total_eur").get<double>()};
        s.iterations = j.at("iterations").get<int>();
        s.evaluations = j.at("evaluations").get<long>();
        s.converged = j.at("converged").get<bool>();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("result JSON: ") + e.what());
    } catch (const ConfigError& e) {
        throw ParseError(std::string("result JSON: ") + e.what());
    } catch (const InvariantError& e) {
        throw ParseError(std::string("result JSON: ") + e.what());
    }
}

}  // namespace costres
