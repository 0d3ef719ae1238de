#include "support.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace bitp;
using namespace bitp::testing;

namespace {

// 20 rows: rows 0-3 satisfy I (v <= 3), rows 0-2 and 10-12 satisfy B.
std::shared_ptr<const Table> twenty_rows()
{
    TableBuilder tb({real("v", "hidden"), label()});
    for (int r = 0; r < 20; ++r) {
        const bool b = r < 3 || (r >= 10 && r < 13);
        tb.add_row({double(r), b ? 1.0 : 0.0});
    }
    return std::move(tb).build();
}

}  // namespace

TEST(Evaluate, TrueInterpolant)
{
    auto t = twenty_rows();
    const Dataset d(t);
    const auto r = evaluate(Conjunction{}, positive(*t), d);
    EXPECT_EQ(*r.precision(), frequency(d, positive(*t)));
    EXPECT_EQ(r.recall()->value(), 1.0);
}

TEST(Evaluate, ZeroSupportIsUndefined)
{
    auto t = twenty_rows();
    const auto r = evaluate(Conjunction({Atom{0, Relation::ge, 100}}), positive(*t), Dataset(t));
    EXPECT_FALSE(r.precision());
    EXPECT_EQ(r.support, 0u);
    EXPECT_EQ(*r.recall(), (Ratio{0, 6}));
}

TEST(Evaluate, HandBuiltCounts)
{
    auto t = twenty_rows();
    const auto r = evaluate(Conjunction({Atom{0, Relation::le, 3}}), positive(*t), Dataset(t));
    EXPECT_EQ(r.support, 4u);
    EXPECT_EQ(r.b_support, 6u);
    EXPECT_EQ(r.true_positives, 3u);
    EXPECT_EQ(*r.precision(), (Ratio{3, 4}));
    EXPECT_EQ(*r.recall(), (Ratio{3, 6}));
    EXPECT_EQ(r.rows, 20u);
}

TEST(Evaluate, EmptyTestSetIsAnError)
{
    auto t = twenty_rows();
    EXPECT_THROW((void)evaluate(Conjunction{}, positive(*t),
                                Dataset(t).condition(Atom{0, Relation::ge, 99})),
                 UndefinedMeasure);
}

TEST(PooledPrecision, Cases)
{
    auto t = twenty_rows();
    const Dataset d(t);
    const Conjunction b({positive(*t)});
    const Conjunction four({Atom{0, Relation::le, 3}});     // tp 3, support 4
    const Conjunction none({Atom{0, Relation::ge, 100}});   // support 0
    const Conjunction one({Atom{0, Relation::ge, 12}, Atom{0, Relation::le, 12}});  // tp 1, sup 1

    const EvalCase single[] = {{four, b}};
    EXPECT_EQ(pooled_precision(single, d), evaluate(four, b, d).precision());
    const EvalCase with_empty[] = {{four, b}, {none, b}};
    EXPECT_EQ(*pooled_precision(with_empty, d), (Ratio{3, 4}));
    const EvalCase two[] = {{four, b}, {one, b}};
    EXPECT_EQ(*pooled_precision(two, d), (Ratio{4, 5}));
    const EvalCase empty_only[] = {{none, b}};
    EXPECT_FALSE(pooled_precision(empty_only, d));
}

TEST(Sweep, SinglePointSinglePremiseEqualsEvaluate)
{
    auto t = boosting_fixture();
    const Dataset d(t);
    const PremiseCase batch[] = {{Premise(t, 0, "input"), Conjunction({positive(*t)})}};
    SweepConfig cfg;
    cfg.alpha = 0.95;
    cfg.gammas = {0.8};
    cfg.mus = {0.9};
    cfg.vocabulary = {1, 2};
    const SweepResult r = sweep(batch, d, d, cfg);
    ASSERT_EQ(r.points.size(), 1u);

    MiningParams p;
    p.alpha = 0.95;
    p.gamma = 0.8;
    p.mu = 0.9;
    p.vocabulary = {1, 2};
    const auto rep = conj_interp(batch[0].premise, batch[0].conclusion, d, p);
    const auto e = evaluate(rep.interpolant, batch[0].conclusion, d);
    EXPECT_EQ(r.points[0].avg_precision, e.precision()->value());
    EXPECT_EQ(r.points[0].avg_recall, e.recall()->value());
    EXPECT_EQ(r.points[0].avg_complexity, double(e.complexity));
    EXPECT_EQ(r.points[0].n_undefined, 0u);
    EXPECT_EQ(r.points[0].n_total, 1u);
}

TEST(Sweep, GridOrderAndOutputFormats)
{
    auto t = boosting_fixture();
    const Dataset d(t);
    const PremiseCase batch[] = {{Premise(t, 0, "input"), Conjunction({positive(*t)})},
                                 {Premise(t, 3, "input"), Conjunction({positive(*t)})}};
    SweepConfig cfg;
    cfg.alpha = 0.95;
    cfg.gammas = {0.5, 0.8};
    cfg.mus = {0.8, 1.0};
    cfg.vocabulary = {1, 2};
    cfg.jobs = 4;
    const SweepResult r = sweep(batch, d, d, cfg);
    ASSERT_EQ(r.points.size(), 4u);
    EXPECT_EQ(r.points[1].gamma, 0.5);
    EXPECT_EQ(r.points[1].mu, 1.0);
    EXPECT_EQ(r.points[2].gamma, 0.8);

    cfg.jobs = 1;
    std::ostringstream a, b, g;
    write_sweep_csv(r, a);
    write_sweep_csv(sweep(batch, d, d, cfg), b);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(a.str().substr(0, a.str().find('\n')),
              "gamma,mu,avg_precision,avg_recall,avg_complexity,n_undefined,n_total");
    write_sweep_gnuplot(r, g);
    EXPECT_NE(g.str().find("\n\n0.8 0.8 "), std::string::npos);
}

TEST(Sweep, UndefinedPrecisionIsCountedNotAveraged)
{
    auto t = boosting_fixture();
    // Test set: only the negative rows, none of which the mined interpolant covers.
    const Dataset train(t);
    const Dataset test = train.condition(Atom{t->index_of("v2"), Relation::ge, 6});
    const PremiseCase batch[] = {{Premise(t, 0, "input"), Conjunction({positive(*t)})}};
    SweepConfig cfg;
    cfg.alpha = 0.95;
    cfg.gammas = {0.8};
    cfg.mus = {0.9};
    cfg.vocabulary = {1, 2};
    const SweepResult r = sweep(batch, train, test, cfg);
    EXPECT_EQ(r.points[0].n_undefined, 1u);
    EXPECT_FALSE(r.points[0].avg_precision);
    std::ostringstream csv;
    write_sweep_csv(r, csv);
    EXPECT_NE(csv.str().find("\n0.8,0.9,,"), std::string::npos);
}
