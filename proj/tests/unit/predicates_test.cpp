#include "support.hpp"

#include <gtest/gtest.h>

using namespace bitp;
using namespace bitp::testing;

namespace {

std::shared_ptr<const Table> vu_table()
{
    Observable w{"w", RangeKind::categorical, "output", 0, {"6", "7", "8"}};
    return TableBuilder({real("v", "hidden", 0), real("u", "hidden", 1), w})
        .add_row({5, 1, 1})
        .add_row({7, 3, 0})
        .build();
}

}  // namespace

TEST(Holds, EmptyConjunctionIsTrue)
{
    auto t = vu_table();
    EXPECT_TRUE(holds(Observation{t.get(), 0}, Conjunction{}));
    EXPECT_TRUE(holds(Observation{t.get(), 1}, Conjunction{}));
}

TEST(Holds, BoundsCompareDirectly)
{
    auto t = vu_table();
    const Conjunction phi({make_atom(*t, "v", Relation::le, 6), make_atom(*t, "v", Relation::ge, 4)});
    EXPECT_TRUE(holds(Observation{t.get(), 0}, phi));
    EXPECT_FALSE(holds(Observation{t.get(), 1}, phi));
}

TEST(Holds, CategoricalEquality)
{
    auto t = vu_table();
    const Atom w7 = make_category_atom(*t, "w", "7");
    EXPECT_TRUE(holds(Observation{t.get(), 0}, w7));
    EXPECT_FALSE(holds(Observation{t.get(), 1}, w7));
    EXPECT_EQ(describe(w7, *t), "w = 7");
}

TEST(Holds, UnknownColumnIsAnError)
{
    auto t = vu_table();
    EXPECT_THROW((void)Atom({9, Relation::le, 0}).holds(*t, 0), EvaluationError);
    EXPECT_THROW((void)make_atom(*t, "nope", Relation::le, 0), EvaluationError);
    EXPECT_THROW((void)make_category_atom(*t, "w", "11"), EvaluationError);
    EXPECT_THROW((void)make_atom(*t, "w", Relation::le, 1), EvaluationError);
}

TEST(Conjoin, TrueAndAtom)
{
    auto t = vu_table();
    const Conjunction c = conjoin(Conjunction{}, make_atom(*t, "v", Relation::ge, 4));
    EXPECT_EQ(c.complexity(), 1u);
    EXPECT_EQ(describe(c, *t), "v >= 4");
    EXPECT_EQ(describe(Conjunction{}, *t), "true");
}

TEST(Conjoin, TwoAtomsTwoObservables)
{
    auto t = vu_table();
    const Conjunction c = conjoin(Conjunction({make_atom(*t, "v", Relation::ge, 4)}),
                                  Conjunction({make_atom(*t, "u", Relation::le, 2)}));
    EXPECT_EQ(c.complexity(), 2u);
    EXPECT_EQ(c.vocabulary(), (std::set<std::size_t>{0, 1}));
}

TEST(Conjoin, DuplicatesAreCounted)
{
    const Atom a{0, Relation::ge, 4};
    const Conjunction c = conjoin(conjoin(Conjunction{}, a), a);
    EXPECT_EQ(c.complexity(), 2u);
    EXPECT_EQ(c.vocabulary().size(), 1u);
}

TEST(Premise, RowSatisfiesItsOwnPremise)
{
    auto t = boosting_fixture();
    Dataset d(t);
    const Premise a = premise_of_row(d, 0, "input");
    EXPECT_TRUE(a.holds(*t, 0));
    EXPECT_EQ(d.count(a), 1u);
    EXPECT_GE(frequency(d, a), (Ratio{1, d.size()}));
}

TEST(Premise, OneDifferingInputBreaksEquality)
{
    std::vector<Observable> obs;
    for (std::size_t i = 0; i < 4; ++i)
        obs.push_back(real("p" + std::to_string(i), "input", i));
    obs.push_back(real("h", "hidden"));
    auto t = TableBuilder(obs)
                 .add_row({0.1, 0.2, 0.3, 0.4, 9})
                 .add_row({0.1, 0.2, 0.3, 0.4, 1})   // same inputs, other hidden value
                 .add_row({0.1, 0.2, 0.35, 0.4, 9})  // one input differs
                 .build();
    const Premise a(t, 0, "input");
    EXPECT_TRUE(a.holds(*t, 1));
    EXPECT_FALSE(a.holds(*t, 2));
    EXPECT_EQ(a.columns().size(), 4u);
}

TEST(Premise, RejectsBadRowAndEmptyLayer)
{
    auto t = boosting_fixture();
    EXPECT_THROW(Premise(t, 99, "input"), ContractError);
    EXPECT_THROW(Premise(t, 0, "nope"), ContractError);
}

TEST(Relation, ParsesWordsAndSymbols)
{
    EXPECT_EQ(parse_relation("le"), Relation::le);
    EXPECT_EQ(parse_relation(">="), Relation::ge);
    EXPECT_EQ(parse_relation("="), Relation::eq);
    EXPECT_FALSE(parse_relation("<"));
}
