#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <optional>
#include <set>

using namespace bitp;
using namespace bitp::testing;

namespace {

Dataset column_of(std::initializer_list<double> values)
{
    TableBuilder tb({real("v", "hidden")});
    for (double v : values) tb.add_row({v});
    return Dataset(std::move(tb).build());
}

// Least stored c with count(v <= c) / n >= p, by scanning every candidate.
std::optional<double> scan_upper(std::span<const double> vals, double p)
{
    std::optional<double> best;
    for (double c : vals) {
        std::uint64_t k = 0;
        for (double x : vals) k += x <= c;
        if (Ratio{k, vals.size()}.at_least(p) && (!best || c < *best)) best = c;
    }
    return best;
}

std::optional<double> scan_lower(std::span<const double> vals, double p)
{
    std::optional<double> best;
    for (double c : vals) {
        std::uint64_t k = 0;
        for (double x : vals) k += x >= c;
        if (Ratio{k, vals.size()}.at_least(p) && (!best || c > *best)) best = c;
    }
    return best;
}

}  // namespace

TEST(UpperFractile, Examples)
{
    const Dataset d = column_of({1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    EXPECT_EQ(upper_fractile(d, 1.0, 0, Conjunction{}), 10);
    EXPECT_EQ(upper_fractile(d, 0.6, 0, Conjunction{}), 6);
    EXPECT_EQ(upper_fractile(column_of({5, 5, 5}), 0.5, 0, Conjunction{}), 5);
}

TEST(LowerFractile, Examples)
{
    const Dataset d = column_of({1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    EXPECT_EQ(lower_fractile(d, 1.0, 0, Conjunction{}), 1);
    EXPECT_EQ(lower_fractile(d, 0.75, 0, Conjunction{}), 3);
    for (double p : {1e-9, 0.3, 0.5, 0.98, 1.0}) {
        EXPECT_EQ(lower_fractile(column_of({6}), p, 0, Conjunction{}), 6);
        EXPECT_EQ(upper_fractile(column_of({6}), p, 0, Conjunction{}), 6);
    }
}

TEST(Fractile, RespectsCondition)
{
    const Dataset d = column_of({1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    const Atom big{0, Relation::ge, 6};
    EXPECT_EQ(upper_fractile(d, 0.2, 0, big), 6);
    EXPECT_EQ(lower_fractile(d, 0.2, 0, big), 10);
}

TEST(Fractile, RejectsZeroProbabilityAndEmptyCondition)
{
    const Dataset d = column_of({1, 2, 3});
    EXPECT_THROW((void)upper_fractile(d, 0.0, 0, Conjunction{}), ContractError);
    EXPECT_THROW((void)lower_fractile(d, 1.5, 0, Conjunction{}), ContractError);
    EXPECT_THROW((void)upper_fractile(d, 0.5, 0, Atom{0, Relation::ge, 9}), UndefinedMeasure);
}

TEST(FractileRank, MatchesThresholdRule)
{
    for (std::size_t n = 1; n <= 60; ++n)
        for (int i = 1; i <= 100; ++i) {
            const double p = i / 100.0;
            const std::size_t k = fractile_rank(p, n);
            EXPECT_TRUE(Ratio({k, n}).at_least(p));
            if (k > 1) EXPECT_FALSE(Ratio({k - 1, n}).at_least(p)) << p << " " << n;
        }
    // 0.55 is not exactly 11/20 in binary; the threshold still admits 11/20.
    EXPECT_EQ(fractile_rank(0.55, 20), 11u);
    EXPECT_EQ(fractile_rank(0.95, 20), 19u);
}

TEST(FractileProperty, EqualsBruteForceScan)
{
    SynthRng rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng.below(200);
        const std::size_t levels = rng.below(2) ? 1 + rng.below(8) : 0;
        TableBuilder tb({real("v", "hidden")});
        for (std::size_t i = 0; i < n; ++i)
            tb.add_row({levels ? double(rng.below(levels)) : rng.uniform()});
        const Dataset d(std::move(tb).build());
        const SortedColumn sc(d, 0);
        const double p = rng.below(4) == 0 ? double(1 + rng.below(20)) / 20 : 1e-6 + rng.uniform();
        const double pp = std::min(p, 1.0);
        EXPECT_EQ(sc.upper(pp), scan_upper(d.table().column(0), pp));
        EXPECT_EQ(sc.lower(pp), scan_lower(d.table().column(0), pp));
        const std::set<double> values(d.table().column(0).begin(), d.table().column(0).end());
        EXPECT_TRUE(values.contains(sc.upper(pp)));
        EXPECT_TRUE(values.contains(sc.lower(pp)));
    }
}

TEST(FractileProperty, MonotoneInProbability)
{
    SynthRng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        TableBuilder tb({real("v", "hidden")});
        const std::size_t n = 1 + rng.below(150);
        for (std::size_t i = 0; i < n; ++i) tb.add_row({double(rng.below(30))});
        const SortedColumn sc(Dataset(std::move(tb).build()), 0);
        double prev_u = -1e300, prev_l = 1e300;
        for (int i = 1; i <= 200; ++i) {
            const double p = i / 200.0;
            EXPECT_GE(sc.upper(p), prev_u);
            EXPECT_LE(sc.lower(p), prev_l);
            prev_u = sc.upper(p);
            prev_l = sc.lower(p);
        }
    }
}

TEST(FractileProperty, LowerBelowUpperAboveHalfOnDistinctValues)
{
    SynthRng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        TableBuilder tb({real("v", "hidden")});
        const std::size_t n = 1 + rng.below(100);
        for (std::size_t i = 0; i < n; ++i) tb.add_row({rng.uniform()});
        const SortedColumn sc(Dataset(std::move(tb).build()), 0);
        for (int i = 51; i <= 100; ++i) EXPECT_LE(sc.lower(i / 100.0), sc.upper(i / 100.0));
    }
}

TEST(FractileCache, ReusesSortedColumnsPerRowSet)
{
    const Dataset d = column_of({3, 1, 2, 5, 4});
    FractileCache cache;
    const auto a = cache.get(d, 0);
    const auto b = cache.get(d.condition(Conjunction{}), 0);
    EXPECT_EQ(a.get(), b.get());
    const auto c = cache.get(d.condition(Atom{0, Relation::ge, 2}), 0);
    EXPECT_NE(a.get(), c.get());
    EXPECT_EQ(cache.size(), 2u);
    EXPECT_EQ(c->values(), (std::vector<double>{2, 3, 4, 5}));
}

TEST(FractileCache, ConcurrentGetsAgree)
{
    auto rc = random_case(3, 500, 6, 0);
    const Dataset d(rc.table);
    FractileCache cache;
    std::vector<const SortedColumn*> seen(64);
    parallel_for(seen.size(), 8, [&](std::size_t i) { seen[i] = cache.get(d, 2 + i % 6).get(); });
    for (std::size_t i = 6; i < seen.size(); ++i) EXPECT_EQ(seen[i], seen[i % 6]);
    EXPECT_EQ(cache.size(), 6u);
}

// Sorting, not pairwise scanning: 1e5 rows must stay well inside a second.
TEST(FractileProperty, LargeColumnTimingBudget)
{
    SynthRng rng(11);
    TableBuilder tb({real("v", "hidden")});
    for (int i = 0; i < 100000; ++i) tb.add_row({rng.uniform()});
    const Dataset d(std::move(tb).build());
    const auto start = std::chrono::steady_clock::now();
    for (int i = 1; i <= 10; ++i) (void)upper_fractile(d, i / 10.0, 0, Conjunction{});
    const auto elapsed = std::chrono::steady_clock::now() - start;
    EXPECT_LT(std::chrono::duration<double>(elapsed).count(), 2.0);
}
