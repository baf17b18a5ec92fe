#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "ctsynth/error.hpp"
#include "ctsynth/inference.hpp"
#include "ctsynth/synthesis.hpp"

using namespace ctsynth;

namespace {

Schema age_by_lang() {
    return Schema({Variable("age", {"young", "old"}), Variable("lang", {"en", "cy", "fr", "de"})});
}

MarginalOddsSpec identity_spec() {
    return {{"a", {"1"}, {"0"}}, {"b", {"1"}, {"0"}}, {}};
}

}  // namespace

TEST(Marginalize, IdentityOnTwoByTwo) {
    const ContingencyTable t(Schema({Variable::indexed("a", 2), Variable::indexed("b", 2)}), {4, 3, 2, 1});
    const TwoByTwo m = marginalize_2x2(t, identity_spec());
    // cell (a=0,b=0) is index 0
    EXPECT_EQ(m.n00, 4);
    EXPECT_EQ(m.n01, 3);
    EXPECT_EQ(m.n10, 2);
    EXPECT_EQ(m.n11, 1);
}

TEST(Marginalize, PairingColumnsGivesSums) {
    const ContingencyTable t(age_by_lang(), {1, 2, 3, 4, 5, 6, 7, 8});
    const MarginalOddsSpec spec{{"age", {"old"}, {"young"}}, {"lang", {"en", "cy"}, {"fr", "de"}}, {}};
    const TwoByTwo m = marginalize_2x2(t, spec);
    EXPECT_EQ(m.n01, 1 + 2);
    EXPECT_EQ(m.n00, 3 + 4);
    EXPECT_EQ(m.n11, 5 + 6);
    EXPECT_EQ(m.n10, 7 + 8);
    EXPECT_EQ(marginalize_2x2(RealTable::from_counts(t), spec).n10, 15.0);
}

TEST(Marginalize, FiltersAndUnassignedCategoriesDropCells) {
    const Schema s({Variable("age", {"young", "old"}), Variable("lang", {"en", "cy", "fr"}),
                    Variable("sex", {"f", "m"})});
    std::vector<std::int64_t> counts(12);
    std::iota(counts.begin(), counts.end(), 1);
    const ContingencyTable t(s, counts);
    const MarginalOddsSpec spec{{"age", {"old"}, {"young"}}, {"lang", {"en"}, {"cy"}}, {{"sex", {"m"}}}};
    const TwoByTwo m = marginalize_2x2(t, spec);
    // (young,en,m)=2 (young,cy,m)=4 (old,en,m)=8 (old,cy,m)=10
    EXPECT_EQ(m.n01, 2);
    EXPECT_EQ(m.n00, 4);
    EXPECT_EQ(m.n11, 8);
    EXPECT_EQ(m.n10, 10);
}

TEST(Marginalize, RejectsBadSpecs) {
    const ContingencyTable t(age_by_lang(), std::vector<std::int64_t>(8, 1));
    EXPECT_THROW(marginalize_2x2(t, {{"age", {}, {"young"}}, {"lang", {"en"}, {"cy"}}, {}}), ValidationError);
    EXPECT_THROW(marginalize_2x2(t, {{"age", {"old"}, {"young"}}, {"lang", {"xx"}, {"cy"}}, {}}), ValidationError);
    EXPECT_THROW(marginalize_2x2(t, {{"age", {"old"}, {"old"}}, {"lang", {"en"}, {"cy"}}, {}}), ValidationError);
    EXPECT_THROW(marginalize_2x2(t, {{"age", {"old"}, {"young"}}, {"age", {"old"}, {"young"}}, {}}),
                 ValidationError);
    EXPECT_THROW(marginalize_2x2(t, {{"nope", {"old"}, {"young"}}, {"lang", {"en"}, {"cy"}}, {}}),
                 ValidationError);
}

TEST(LogOddsRatio, Arithmetic) {
    const auto e = log_odds_ratio({10, 10, 10, 10});
    EXPECT_EQ(e.q, 0.0);
    EXPECT_NEAR(e.v, 0.4, 1e-15);
    const auto f = log_odds_ratio({20, 10, 10, 20});
    EXPECT_NEAR(f.q, std::log(4.0), 1e-15);
    EXPECT_NEAR(f.v, 0.3, 1e-15);
}

TEST(LogOddsRatio, ZeroCellNeedsCorrection) {
    try {
        log_odds_ratio({0, 1, 2, 3});
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("0.5"), std::string::npos);
    }
    const auto e = log_odds_ratio({0, 1, 2, 3}, 0.5);
    EXPECT_NEAR(e.q, std::log(0.5 * 3.5 / (1.5 * 2.5)), 1e-15);
}

TEST(LogOddsRatio, ScaleInvariantPoint) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.5, 50);
    for (int i = 0; i < 100; ++i) {
        const TwoByTwo t{u(rng), u(rng), u(rng), u(rng)};
        const double c = u(rng);
        EXPECT_NEAR(log_odds_ratio(t).q, log_odds_ratio({c * t.n11, c * t.n10, c * t.n01, c * t.n00}).q, 1e-12);
    }
}

TEST(CombineTp, WorkedExample) {
    const std::vector<ReplicateEstimate> est{{1, 0.5, 0}, {3, 0.5, 0}};
    const CombinedEstimate c = combine_tp(est);
    EXPECT_DOUBLE_EQ(c.q_bar, 2.0);
    EXPECT_DOUBLE_EQ(c.b_m, 2.0);
    EXPECT_DOUBLE_EQ(c.v_bar, 0.5);
    EXPECT_DOUBLE_EQ(c.variance, 1.5);
    EXPECT_DOUBLE_EQ(c.dof, 2.25);
    const double half = reference_quantile(0.95, 2.25) * std::sqrt(1.5);
    EXPECT_DOUBLE_EQ(c.interval.upper, 2.0 + half);
    EXPECT_DOUBLE_EQ(c.interval.lower, 2.0 - half);
}

TEST(CombineTp, SingleReplicateRejectedNamingTs) {
    const std::vector<ReplicateEstimate> one{{1, 0.5, 0}};
    try {
        combine_tp(one);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("T_s"), std::string::npos);
    }
}

TEST(CombineTp, DegenerateBetweenVariance) {
    const std::vector<ReplicateEstimate> same{{0.7, 0.2, 0}, {0.7, 0.2, 0}, {0.7, 0.2, 0}};
    const CombinedEstimate c = combine_tp(same);
    EXPECT_EQ(c.b_m, 0.0);
    EXPECT_TRUE(std::isinf(c.dof));
    EXPECT_DOUBLE_EQ(c.variance, 0.2);
    EXPECT_NEAR(c.interval.upper - 0.7, 1.959963984540054 * std::sqrt(0.2), 1e-12);
}

TEST(CombineTp, Properties) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> z(0, 1);
    std::uniform_real_distribution<double> u(0.01, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t m = 2 + trial % 10;
        std::vector<ReplicateEstimate> est(m);
        for (auto& e : est) e = {z(rng), u(rng), 0};
        const CombinedEstimate c = combine_tp(est);
        EXPECT_GE(c.variance, c.v_bar);
        const double t_half = c.interval.upper - c.q_bar;
        EXPECT_GE(t_half, reference_quantile(0.95, INFINITY) * std::sqrt(c.variance) - 1e-12);
    }
    // dof grows without bound as b_m / v_bar shrinks
    double last = 0;
    for (double spread : {1.0, 0.1, 0.01, 0.001}) {
        const std::vector<ReplicateEstimate> est{{-spread, 1, 0}, {spread, 1, 0}};
        const CombinedEstimate c = combine_tp(est);
        EXPECT_GT(c.dof, last);
        last = c.dof;
    }
    EXPECT_GT(last, 1e12);
}

TEST(CombineTs, Arithmetic) {
    EXPECT_DOUBLE_EQ(combine_ts(1.0, 0.0, 1, 100, 100).variance, 2.0);
    EXPECT_DOUBLE_EQ(combine_ts(0.5, 0.0, 5, 100, 100).variance, 0.6);
    EXPECT_NEAR(combine_ts(0.5, 0.0, 1'000'000'000, 100, 100).variance, 0.5, 1e-9);
    EXPECT_DOUBLE_EQ(combine_ts(1.0, 0.0, 1, 50, 100).variance, 1.5);
    const CombinedEstimate c = combine_ts(1.0, 0.3, 1, 100, 100);
    EXPECT_TRUE(std::isinf(c.dof));
    EXPECT_NEAR(c.interval.upper - 0.3, 1.959963984540054 * std::sqrt(2.0), 1e-12);
    EXPECT_THROW(combine_ts(1.0, 0.0, 1, 100, 0), ValidationError);
}

TEST(ReferenceQuantile, TBeyondNormal) {
    EXPECT_NEAR(reference_quantile(0.95, INFINITY), 1.959963984540054, 1e-12);
    EXPECT_NEAR(reference_quantile(0.95, 1.0), 12.706204736174705, 1e-9);
    EXPECT_GT(reference_quantile(0.95, 2.25), reference_quantile(0.95, 3.0));
}

namespace {

ContingencyTable association_table(std::uint64_t seed) {
    const Schema s({Variable::indexed("row", 2), Variable::indexed("col", 2), Variable::indexed("rest", 50)});
    std::mt19937_64 rng(seed);
    std::poisson_distribution<std::int64_t> lo(8), hi(14);
    std::vector<std::int64_t> counts(s.cell_count());
    for (std::size_t c = 0; c < counts.size(); ++c) {
        const bool diag = s.category_of(c, 0) == s.category_of(c, 1);
        counts[c] = diag ? hi(rng) : lo(rng);
    }
    return ContingencyTable(s, counts);
}

MarginalOddsSpec association_spec() {
    return {{"row", {"1"}, {"0"}}, {"col", {"1"}, {"0"}}, {}};
}

}  // namespace

TEST(AnalyzeEnsemble, IdenticalReplicatesMatchAveragedPoint) {
    const ContingencyTable t = association_table(3);
    const std::vector<std::int64_t> c(t.counts().begin(), t.counts().end());
    const SyntheticEnsemble ens(t.schema(), {c, c, c}, SynthesisParams{}, t.total());
    const CombinedEstimate sep = analyze_ensemble(ens, association_spec());
    EXPECT_EQ(sep.b_m, 0.0);
    const CombinedEstimate avg = analyze_ensemble(ens, association_spec(), {AnalysisMode::averaged, Estimator::ts});
    EXPECT_NEAR(sep.q_bar, avg.q_bar, 1e-12);
    EXPECT_NEAR(avg.variance, avg.v_bar * (1.0 + 1.0 / 3.0), 1e-15);
}

TEST(AnalyzeEnsemble, SingleReplicateAveragedTs) {
    const ContingencyTable t = association_table(4);
    const SyntheticEnsemble ens = synthesize(t, SynthesisParams{0.0, 0.0, 1, 1.0, 6});
    const CombinedEstimate c = analyze_ensemble(ens, association_spec(), {AnalysisMode::averaged, Estimator::ts});
    EXPECT_EQ(c.m, 1);
    EXPECT_DOUBLE_EQ(c.n, static_cast<double>(t.total()));
    EXPECT_DOUBLE_EQ(c.n_syn, static_cast<double>(ens.n_syn()[0]));
    EXPECT_NEAR(c.variance, c.v_bar * (c.n_syn / c.n + 1.0), 1e-15);
    EXPECT_THROW(analyze_ensemble(ens, association_spec()), ValidationError);
    EXPECT_THROW(analyze_ensemble(ens, association_spec(), {AnalysisMode::averaged, Estimator::tp}),
                 ValidationError);
}

TEST(AnalyzeEnsemble, PooledAndAveragedPointsAgree) {
    const ContingencyTable t = association_table(5);
    const SyntheticEnsemble ens = synthesize(t, SynthesisParams{0.5, 0.0, 7, 1.0, 8});
    const auto spec = association_spec();
    EXPECT_NEAR(log_odds_ratio(marginalize_2x2(pool_ensemble(ens), spec)).q,
                log_odds_ratio(marginalize_2x2(average_ensemble(ens), spec)).q, 1e-12);
}

TEST(AnalyzeTable, NormalInterval) {
    const ContingencyTable t = association_table(9);
    const IntervalEstimate iv = analyze_table(t, association_spec());
    const auto e = log_odds_ratio(marginalize_2x2(t, association_spec()));
    EXPECT_DOUBLE_EQ(iv.point, e.q);
    EXPECT_NEAR(iv.upper - iv.point, 1.959963984540054 * std::sqrt(e.v), 1e-12);
}
