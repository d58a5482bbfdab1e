#include <gtest/gtest.h>

#include <map>
#include <random>

#include "costres/partition.hpp"

using namespace costres;

namespace {

// Random valid partition of `horizon` on `grid` with T periods; edges may be empty.
TimePartition random_partition(std::mt19937_64& rng, int T, int horizon, int grid) {
    const int slots = horizon / grid;
    std::vector<int> cuts;
    std::uniform_int_distribution<int> pick(1, slots - 1);
    while (static_cast<int>(cuts.size()) < T - 1) {
        int c = pick(rng);
        if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<int> lengths;
    int prev = 0;
    for (int c : cuts) {
        lengths.push_back((c - prev) * grid);
        prev = c;
    }
    lengths.push_back((slots - prev) * grid);
    return TimePartition(lengths, grid, horizon);
}

}  // namespace

TEST(TimePartition, RejectsInvalidLengths) {
    EXPECT_THROW(TimePartition({60, 0, 60}, 10), InvariantError);
    EXPECT_THROW(TimePartition({55, 65}, 10), InvariantError);
    EXPECT_THROW(TimePartition({60, 60}, 10, 130), InvariantError);
    EXPECT_THROW(TimePartition({-10, 70}, 10), InvariantError);
    EXPECT_NO_THROW(TimePartition({0, 60, 0}, 10));
}

TEST(UniformPartition, HourlyDay) {
    auto p = uniform_partition(24, 1440, 10);
    ASSERT_EQ(p.size(), 24u);
    for (int l : p.lengths()) EXPECT_EQ(l, 60);
}

TEST(UniformPartition, SinglePeriod) {
    auto p = uniform_partition(1, 1440, 10);
    ASSERT_EQ(p.size(), 1u);
    EXPECT_EQ(p.length(0), 1440);
}

TEST(UniformPartition, DivisibilityErrors) {
    EXPECT_THROW(uniform_partition(7, 1440, 10), InvariantError);
    EXPECT_THROW(uniform_partition(96, 1440, 10), InvariantError);  // 15-min periods
}

TEST(WardMerge, FullResolutionIsIdentity) {
    std::vector<double> v{3, 1, 4, 1, 5, 9};
    auto p = adjacent_ward_merge(v, 6, 10);
    for (int l : p.lengths()) EXPECT_EQ(l, 10);
}

TEST(WardMerge, MergesIdenticalNeighboursFirst) {
    std::vector<double> v{0, 0, 10};
    auto p = adjacent_ward_merge(v, 2, 10);
    EXPECT_EQ(p.lengths(), (std::vector<int>{20, 10}));
}

TEST(WardMerge, DissimilarityArithmetic) {
    EXPECT_DOUBLE_EQ(ward_dissimilarity(1, 100, 2, 130), 1200.0);
    EXPECT_DOUBLE_EQ(ward_dissimilarity(2, 130, 1, 100), 1200.0);
}

TEST(WardMerge, ConstantSeriesMergesLeftmostFirst) {
    // Every merge costs zero, so the leftmost pair always wins: the first cluster grows.
    std::vector<double> v(12, 7.0);
    auto p = adjacent_ward_merge(v, 4, 10);
    EXPECT_EQ(p.lengths(), (std::vector<int>{90, 10, 10, 10}));
}

TEST(WardMerge, TargetOutOfRange) {
    std::vector<double> v{1, 2, 3};
    EXPECT_THROW(adjacent_ward_merge(v, 0, 10), InvariantError);
    EXPECT_THROW(adjacent_ward_merge(v, 4, 10), InvariantError);
}

TEST(WardMerge, MatchesBruteForceMergeOrder) {
    // Independent re-implementation over explicit member lists.
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> d(0.0, 100.0);
    for (int rep = 0; rep < 30; ++rep) {
        std::vector<double> v(20);
        for (auto& x : v) x = d(rng);
        int target = 1 + rep % 12;
        std::vector<std::vector<double>> cl;
        for (double x : v) cl.push_back({x});
        auto mean = [](const std::vector<double>& c) {
            double s = 0;
            for (double x : c) s += x;
            return s / static_cast<double>(c.size());
        };
        while (static_cast<int>(cl.size()) > target) {
            std::size_t best = 0;
            double bh = 1e300;
            for (std::size_t k = 0; k + 1 < cl.size(); ++k) {
                double a = static_cast<double>(cl[k].size()), b = static_cast<double>(cl[k + 1].size());
                double dm = mean(cl[k]) - mean(cl[k + 1]);
                double h = 2 * a * b / (a + b) * dm * dm;
                if (h < bh) bh = h, best = k;
            }
            cl[best].insert(cl[best].end(), cl[best + 1].begin(), cl[best + 1].end());
            cl.erase(cl.begin() + static_cast<long>(best) + 1);
        }
        std::vector<int> expect;
        for (const auto& c : cl) expect.push_back(static_cast<int>(c.size()) * 10);
        EXPECT_EQ(adjacent_ward_merge(v, target, 10).lengths(), expect);
    }
}

TEST(AdaptiveRange, UniformInterior) {
    auto p = uniform_partition(24, 1440, 10);
    auto r = adaptive_range(p, 5);
    EXPECT_DOUBLE_EQ(r.min_len, 30.0);
    EXPECT_DOUBLE_EQ(r.max_len, 90.0);
    EXPECT_EQ(range_candidates(r, 10), (std::vector<int>{40, 50, 60, 70, 80}));
}

TEST(AdaptiveRange, UniformFirst) {
    auto r = adaptive_range(uniform_partition(24, 1440, 10), 0);
    EXPECT_DOUBLE_EQ(r.min_len, 0.0);
    EXPECT_DOUBLE_EQ(r.max_len, 90.0);
    EXPECT_EQ(range_candidates(r, 10).front(), 10);
}

TEST(AdaptiveRange, UnevenFirst) {
    auto r = adaptive_range(TimePartition({30, 90}, 10), 0);
    EXPECT_DOUBLE_EQ(r.min_len, 0.0);
    EXPECT_DOUBLE_EQ(r.max_len, 75.0);
}

TEST(AdaptiveRange, LastPeriodLooksLeft) {
    auto r = adaptive_range(TimePartition({60, 40, 80}, 10), 2);
    EXPECT_DOUBLE_EQ(r.min_len, 0.0);
    EXPECT_DOUBLE_EQ(r.max_len, 100.0);
    EXPECT_THROW(adaptive_range(TimePartition({60, 40, 80}, 10), 3), InvariantError);
}

TEST(ApplyPointUpdates, IdentityAlter) {
    TimePartition p({60, 60, 60}, 10);
    EXPECT_EQ(apply_point_updates(p, {{0, 60}, {1, 60}}), p);
    EXPECT_EQ(apply_point_updates(p, {}), p);
}

TEST(ApplyPointUpdates, BoundaryArithmetic) {
    TimePartition p({60, 60, 60}, 10);
    EXPECT_EQ(apply_point_updates(p, {{0, 50}, {1, 70}}).lengths(), (std::vector<int>{50, 80, 50}));
    EXPECT_EQ(apply_point_updates(TimePartition({60, 60}, 10), {{0, 80}}).lengths(), (std::vector<int>{80, 40}));
}

TEST(ApplyPointUpdates, OutOfRangeRejected) {
    TimePartition p({60, 60, 60}, 10);
    EXPECT_THROW(apply_point_updates(p, {{0, 90}}), InvariantError);
    EXPECT_THROW(apply_point_updates(p, {{1, 30}}), InvariantError);
    EXPECT_THROW(apply_point_updates(p, {{0, 55}}), InvariantError);
    EXPECT_THROW(apply_point_updates(p, {{2, 60}}), InvariantError);
}

TEST(ApplyPointUpdates, RandomAltersStayValid) {
    std::mt19937_64 rng(77);
    for (int rep = 0; rep < 500; ++rep) {
        int T = 2 + static_cast<int>(rng() % 23);
        auto p = random_partition(rng, T, 1440, 10);
        std::map<std::size_t, int> alter;
        for (std::size_t t = 0; t + 1 < p.size(); ++t) {
            auto cand = range_candidates(adaptive_range(p, t), 10);
            ASSERT_FALSE(cand.empty());
            if (rng() % 3 == 0) continue;
            alter[t] = cand[rng() % cand.size()];
        }
        TimePartition q;
        ASSERT_NO_THROW(q = apply_point_updates(p, alter)) << format_partition(p);
        EXPECT_EQ(q.size(), p.size());
        EXPECT_EQ(q.horizon_minutes(), 1440);
        // New boundaries sit where the alter map put them and strictly increase.
        int old_left = 0, prev = 0;
        for (std::size_t t = 0; t + 1 < p.size(); ++t) {
            int len = alter.count(t) ? alter[t] : p.length(t);
            EXPECT_EQ(q.boundary(t), old_left + len);
            EXPECT_GT(q.boundary(t), t == 0 ? -1 : prev);
            prev = q.boundary(t);
            old_left += p.length(t);
        }
    }
}

TEST(ApplyPointUpdates, ExtremeNeighbourMovesNeverCross) {
    std::mt19937_64 rng(78);
    for (int rep = 0; rep < 300; ++rep) {
        auto p = random_partition(rng, 3 + static_cast<int>(rng() % 20), 1440, 10);
        for (std::size_t t = 0; t + 2 < p.size(); ++t) {
            // Point t as far right as allowed, point t+1 as far left as allowed.
            auto a = range_candidates(adaptive_range(p, t), 10);
            auto b = range_candidates(adaptive_range(p, t + 1), 10);
            auto q = apply_point_updates(p, {{t, a.back()}, {t + 1, b.front()}});
            EXPECT_LT(q.boundary(t), q.boundary(t + 1));
        }
    }
}

TEST(Converged, ZeroMovement) {
    EXPECT_TRUE(converged(TimePartition({60, 60}, 10), TimePartition({60, 60}, 10)));
    EXPECT_FALSE(converged(TimePartition({60, 60}, 10), TimePartition({50, 70}, 10)));
    EXPECT_THROW(converged(TimePartition({60, 60}, 10), TimePartition({120}, 10)), ShapeError);
}

TEST(PartitionText, RoundTrip) {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 50; ++rep) {
        auto p = random_partition(rng, 1 + static_cast<int>(rng() % 30), 1440, 10);
        EXPECT_EQ(parse_partition(format_partition(p), 10, 1440), p);
    }
    EXPECT_EQ(format_partition(TimePartition({60, 60, 30, 90}, 10)), "60,60,30,90");
}

TEST(PartitionText, RejectsOffGridAndWrongSum) {
    EXPECT_THROW(parse_partition("60,65,55", 10, 180), ParseError);
    EXPECT_THROW(parse_partition("60,60", 10, 180), ParseError);
    EXPECT_THROW(parse_partition("60,x", 10, 120), ParseError);
    EXPECT_THROW(parse_partition("", 10, 120), ParseError);
}

TEST(MoveBoundary, KeepsPairTotal) {
    TimePartition p({60, 60, 60}, 10);
    auto q = move_boundary(p, 1, 80);
    EXPECT_EQ(q.lengths(), (std::vector<int>{60, 80, 40}));
}
