#pragma once

// Ordered period lengths on a fixed minute grid, plus the moves the
// temporal-resolution search is allowed to make on them.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "costres/error.hpp"

namespace costres {

/// Period lengths in minutes. Every length is a multiple of the grid, the sum is
/// exactly the horizon, and only the first and last period may have zero length.
class TimePartition {
public:
    TimePartition() = default;

    TimePartition(std::vector<int> lengths_minutes, int grid_minutes)
        : lengths_(std::move(lengths_minutes)), grid_(grid_minutes) {
        horizon_ = 0;
        for (int l : lengths_) horizon_ += l;
        validate();
    }

    TimePartition(std::vector<int> lengths_minutes, int grid_minutes, int horizon_minutes)
        : lengths_(std::move(lengths_minutes)), grid_(grid_minutes), horizon_(horizon_minutes) {
        validate();
    }

    [[nodiscard]] const std::vector<int>& lengths() const { return lengths_; }
    [[nodiscard]] int length(std::size_t t) const { return lengths_.at(t); }
    [[nodiscard]] std::size_t size() const { return lengths_.size(); }
    [[nodiscard]] int grid_minutes() const { return grid_; }
    [[nodiscard]] int horizon_minutes() const { return horizon_; }

    /// Number of periods with non-zero length.
    [[nodiscard]] std::size_t active_periods() const {
        return static_cast<std::size_t>(
            std::count_if(lengths_.begin(), lengths_.end(), [](int l) { return l > 0; }));
    }

    /// Right edge of period t in minutes from the start of the horizon.
    [[nodiscard]] int boundary(std::size_t t) const {
        int b = 0;
        for (std::size_t k = 0; k <= t; ++k) b += lengths_.at(k);
        return b;
    }

    bool operator==(const TimePartition&) const = default;
    auto operator<=>(const TimePartition&) const = default;

private:
    void validate() const {
        if (grid_ <= 0) throw InvariantError("partition grid must be positive");
        if (lengths_.empty()) throw InvariantError("partition has no periods");
        long long sum = 0;
        for (std::size_t t = 0; t < lengths_.size(); ++t) {
            int l = lengths_[t];
            if (l < 0) throw InvariantError("negative period length at index " + std::to_string(t));
            if (l % grid_ != 0)
                throw InvariantError("period " + std::to_string(t) + " length " +
                                     std::to_string(l) + " is not a multiple of the " +
                                     std::to_string(grid_) + "-minute grid");
            bool edge = t == 0 || t + 1 == lengths_.size();
            if (l == 0 && !edge)
                throw InvariantError("interior period " + std::to_string(t) + " has zero length");
            sum += l;
        }
        if (sum != horizon_)
            throw InvariantError("period lengths sum to " + std::to_string(sum) +
                                 " min, horizon is " + std::to_string(horizon_) + " min");
        if (sum == 0) throw InvariantError("partition covers no time");
    }

    std::vector<int> lengths_;
    int grid_ = 10;
    int horizon_ = 0;
};

/// Open interval of admissible lengths for one period during a sweep.
struct AdaptiveRange {
    std::size_t period = 0;
    double min_len = 0.0;  // exclusive
    double max_len = 0.0;  // exclusive

    [[nodiscard]] bool contains(double len) const { return len > min_len && len < max_len; }
};

inline TimePartition uniform_partition(int periods, int horizon_minutes, int grid_minutes) {
    if (periods < 1) throw InvariantError("need at least one period");
    if (grid_minutes <= 0) throw InvariantError("grid must be positive");
    if (horizon_minutes % periods != 0)
        throw InvariantError("horizon of " + std::to_string(horizon_minutes) +
                             " min is not divisible into " + std::to_string(periods) + " periods");
    int len = horizon_minutes / periods;
    if (len % grid_minutes != 0)
        throw InvariantError("period length " + std::to_string(len) +
                             " min is not a multiple of the " + std::to_string(grid_minutes) +
                             "-minute grid");
    return TimePartition(std::vector<int>(static_cast<std::size_t>(periods), len), grid_minutes,
                         horizon_minutes);
}

/// Ward dissimilarity between two adjacent clusters given sizes and centroids.
inline double ward_dissimilarity(double size_a, double mean_a, double size_b, double mean_b) {
    double d = mean_a - mean_b;
    return 2.0 * size_a * size_b / (size_a + size_b) * d * d;
}

/// Agglomerative clustering restricted to temporally adjacent clusters. Starts from
/// one cluster per value and merges the adjacent pair of least Ward dissimilarity
/// (leftmost on ties) until `target` clusters remain.
inline TimePartition adjacent_ward_merge(std::span<const double> values, int target,
                                         int step_minutes) {
    const auto n = static_cast<int>(values.size());
    if (target < 1 || target > n)
        throw InvariantError("cluster target " + std::to_string(target) + " outside [1, " +
                             std::to_string(n) + "]");
    struct Cluster {
        double size;
        double mean;
    };
    std::vector<Cluster> clusters;
    clusters.reserve(values.size());
    for (double v : values) clusters.push_back({1.0, v});
    while (static_cast<int>(clusters.size()) > target) {
        std::size_t best = 0;
        double best_h = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k + 1 < clusters.size(); ++k) {
            double h = ward_dissimilarity(clusters[k].size, clusters[k].mean, clusters[k + 1].size,
                                          clusters[k + 1].mean);
            if (h < best_h) {
                best_h = h;
                best = k;
            }
        }
        auto& a = clusters[best];
        const auto& b = clusters[best + 1];
        double size = a.size + b.size;
        a.mean = (a.size * a.mean + b.size * b.mean) / size;
        a.size = size;
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(best) + 1);
    }
    std::vector<int> lengths;
    lengths.reserve(clusters.size());
    for (const auto& c : clusters) lengths.push_back(static_cast<int>(c.size) * step_minutes);
    return TimePartition(std::move(lengths), step_minutes, n * step_minutes);
}

/// Admissible open length interval for period `t` (0-based). The first and last periods
/// may shrink to nothing; interior ones keep more than half their length. A period may
/// grow by half of its right neighbour, the last one by half of its left neighbour.
inline AdaptiveRange adaptive_range(const TimePartition& p, std::size_t t) {
    const std::size_t T = p.size();
    if (t >= T)
        throw InvariantError("period index " + std::to_string(t) + " out of range for " +
                             std::to_string(T) + " periods");
    const auto& x = p.lengths();
    AdaptiveRange r;
    r.period = t;
    r.min_len = (t == 0 || t + 1 == T) ? 0.0 : x[t] / 2.0;
    if (t + 1 < T) {
        r.max_len = x[t] + x[t + 1] / 2.0;
    } else {
        r.max_len = x[t] + (T >= 2 ? x[t - 1] / 2.0 : 0.0);
    }
    return r;
}

/// Grid multiples strictly inside the range, ascending.
inline std::vector<int> range_candidates(const AdaptiveRange& r, int grid_minutes) {
    std::vector<int> out;
    auto first = static_cast<int>(std::floor(r.min_len / grid_minutes)) + 1;
    for (int k = std::max(first, 0);; ++k) {
        int len = k * grid_minutes;
        if (!(len < r.max_len)) break;
        if (len > r.min_len) out.push_back(len);
    }
    return out;
}

/// Length of period t after moving only the boundary that closes it.
inline TimePartition move_boundary(const TimePartition& p, std::size_t t, int new_length) {
    if (t + 1 >= p.size()) throw InvariantError("boundary index out of range");
    auto x = p.lengths();
    int pair = x[t] + x[t + 1];
    x[t] = new_length;
    x[t + 1] = pair - new_length;
    return TimePartition(std::move(x), p.grid_minutes(), p.horizon_minutes());
}

/// Applies independently chosen lengths for boundary points 0..T-2. Point t is placed
/// at the old left edge of period t plus its new length; the last period takes the rest.
inline TimePartition apply_point_updates(const TimePartition& current,
                                         const std::map<std::size_t, int>& alter) {
    const std::size_t T = current.size();
    const auto& x = current.lengths();
    for (const auto& [t, len] : alter) {
        if (t + 1 >= T)
            throw InvariantError("point index " + std::to_string(t) + " out of range");
        if (len == x[t]) continue;
        auto r = adaptive_range(current, t);
        if (len % current.grid_minutes() != 0 || !r.contains(len))
            throw InvariantError("length " + std::to_string(len) + " for period " +
                                 std::to_string(t) + " is outside its adaptive range (" +
                                 std::to_string(r.min_len) + ", " + std::to_string(r.max_len) +
                                 ")");
    }
    std::vector<int> boundaries(T > 0 ? T - 1 : 0);
    int old_left = 0;
    for (std::size_t t = 0; t + 1 < T; ++t) {
        auto it = alter.find(t);
        int len = it == alter.end() ? x[t] : it->second;
        boundaries[t] = old_left + len;
        old_left += x[t];
    }
    std::vector<int> lengths(T);
    int prev = 0;
    for (std::size_t t = 0; t + 1 < T; ++t) {
        if (boundaries[t] < prev || (t > 0 && boundaries[t] == prev))
            throw InvariantError("point updates produce crossing boundaries");
        lengths[t] = boundaries[t] - prev;
        prev = boundaries[t];
    }
    lengths[T - 1] = current.horizon_minutes() - prev;
    return TimePartition(std::move(lengths), current.grid_minutes(), current.horizon_minutes());
}

/// Zero total movement of all points.
inline bool converged(const TimePartition& prev, const TimePartition& next) {
    if (prev.size() != next.size() || prev.horizon_minutes() != next.horizon_minutes() ||
        prev.grid_minutes() != next.grid_minutes())
        throw ShapeError("cannot compare partitions of different shape");
    long long moved = 0;
    for (std::size_t t = 0; t < prev.size(); ++t)
        moved += std::abs(prev.lengths()[t] - next.lengths()[t]);
    return moved == 0;
}

inline std::string format_partition(const TimePartition& p) {
    std::string out;
    for (std::size_t t = 0; t < p.size(); ++t) {
        if (t) out.push_back(',');
        out += std::to_string(p.lengths()[t]);
    }
    return out;
}

/// Parses a single CSV line of period lengths; rejects off-grid lengths and wrong sums.
inline TimePartition parse_partition(std::string_view line, int grid_minutes,
                                     int horizon_minutes) {
    std::vector<int> lengths;
    std::size_t pos = 0;
    while (pos <= line.size()) {
        auto comma = line.find(',', pos);
        auto field = line.substr(pos, comma == std::string_view::npos ? line.size() - pos
                                                                      : comma - pos);
        while (!field.empty() && (field.front() == ' ' || field.front() == '\t'))
            field.remove_prefix(1);
        while (!field.empty() &&
               (field.back() == ' ' || field.back() == '\r' || field.back() == '\n' ||
                field.back() == '\t'))
            field.remove_suffix(1);
        int v = 0;
        auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size())
            throw ParseError("bad period length '" + std::string(field) + "'");
        lengths.push_back(v);
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    try {
        return TimePartition(std::move(lengths), grid_minutes, horizon_minutes);
    } catch (const InvariantError& e) {
        throw ParseError(std::string("invalid partition: ") + e.what());
    }
}

}  // namespace costres
