#include "support.hpp"

#include <gtest/gtest.h>

using namespace bitp;
using namespace bitp::testing;

TEST(Oracle, SingleValueVocabularyHasOneCandidateAtom)
{
    TableBuilder tb({integer("id", "input"), real("v", "hidden"), label()});
    for (int r = 0; r < 6; ++r) tb.add_row({double(r), 3.5, double(r % 2)});
    auto t = std::move(tb).build();
    MiningParams p;
    p.vocabulary = {1};
    const Dataset d(t);
    const auto res = oracle_atomic_scored(Premise(t, 0, "input"), positive(*t), d, p,
                                          OracleMode::global);
    // Both v <= 3.5 and v >= 3.5 select every row; le wins the tie.
    EXPECT_EQ(res.atom, (Atom{1, Relation::le, 3.5}));
    EXPECT_EQ(res.feasible, 2u);
    EXPECT_EQ(atomic_interp(Premise(t, 0, "input"), positive(*t), d, p), res.atom);
}

TEST(Oracle, ConclusionEverywhere)
{
    auto rc = random_case(21, 50, 3, 0);
    TableBuilder tb(rc.table->observables());
    std::vector<double> row(rc.table->cols());
    for (std::size_t r = 0; r < rc.table->rows(); ++r) {
        for (std::size_t c = 0; c < row.size(); ++c) row[c] = rc.table->value(r, c);
        row.back() = 1;
        tb.add_row(row);
    }
    auto t = std::move(tb).build();
    MiningParams p;
    p.vocabulary = rc.vocabulary;
    const Dataset d(t);
    const auto a = oracle_atomic_scored(rc.premise, positive(*t), d, p, OracleMode::global);
    EXPECT_EQ(a.precision(), (Ratio{1, 1}));
    // The winner has the smallest support among all feasible thresholds.
    for (std::size_t v : rc.vocabulary)
        for (std::size_t r = 0; r < t->rows(); ++r)
            for (Relation rel : {Relation::le, Relation::ge}) {
                const Atom cand{v, rel, t->value(r, v)};
                if (!conditional(d, cand, rc.premise)->at_least(p.alpha)) continue;
                if (!conditional(d, cand, positive(*t))->at_least(p.gamma)) continue;
                EXPECT_GE(d.count(cand), a.support);
            }
}

TEST(OracleProperty, RestrictedModeMatchesMinerAndGlobalNeverLoses)
{
    std::size_t gap = 0;
    for (std::uint64_t seed = 500; seed < 600; ++seed) {
        auto rc = random_case(seed, 20 + seed % 180, 1 + seed % 6, seed % 3 ? 0 : 4);
        MiningParams p;
        p.alpha = 0.9 + 0.01 * double(seed % 10);
        p.gamma = 0.3 + 0.05 * double(seed % 12);
        p.vocabulary = rc.vocabulary;
        const Dataset d(rc.table);
        const auto mined = atomic_interp_scored(rc.premise, rc.conclusion, d, p);
        const auto restricted =
            oracle_atomic_scored(rc.premise, rc.conclusion, d, p, OracleMode::restricted);
        const auto global =
            oracle_atomic_scored(rc.premise, rc.conclusion, d, p, OracleMode::global);
        EXPECT_EQ(mined.atom, restricted.atom) << "seed " << seed;
        EXPECT_GE(global.precision(), restricted.precision());
        gap += global.precision() > restricted.precision();
    }
    std::cout << "[oracle] global threshold beat the fractile candidates on " << gap
              << " of 100 datasets\n";
}
