#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ctsynth/error.hpp"
#include "ctsynth/synthesis.hpp"
#include "ctsynth/utility.hpp"
#include "oracles.hpp"

using namespace ctsynth;

TEST(PercentDifferences, Arithmetic) {
    const ContingencyTable t(Schema::flat(4), {0, 2, 4, 1});
    EXPECT_EQ(percent_differences(t, RealTable::from_counts(t)), (std::vector<double>{0, 0, 0}));
    const RealTable s(Schema::flat(4), {5, 3, 4, 0});
    EXPECT_EQ(percent_differences(t, s), (std::vector<double>{50, 0, -100}));
    EXPECT_EQ(percent_differences(t, s, 2), (std::vector<double>{50, 0}));
    const auto by = percent_differences_by_count(t, s);
    EXPECT_EQ(by.at(1), std::vector<double>{-100});
    EXPECT_THROW(percent_differences(t, s, 0), ValidationError);
}

TEST(PercentDifferences, UnitCellSpreadMatchesMonteCarlo) {
    const ContingencyTable t = fixture_from_spectrum(census_spectrum(), 200000, 50, 12);
    const RealTable avg = average_ensemble(synthesize(t, SynthesisParams{0.5, 0.0, 50, 1.0, 3}));
    auto ones = percent_differences_by_count(t, avg).at(1);
    const double probs[] = {0.25, 0.75};
    const auto q = quantiles(ones, probs);
    const double iqr = q[1] - q[0];

    // oracle: IQR of 100*(mean of 50 NBI(1,0.5) draws - 1) from an
    // independent stream, replicated to get a standard error
    Engine rng(999);
    std::vector<double> iqrs;
    for (int rep = 0; rep < 30; ++rep) {
        std::vector<double> xs(ones.size());
        for (auto& x : xs) {
            std::int64_t s = 0;
            for (int l = 0; l < 50; ++l) s += nbi_sample(1.0, 0.5, rng);
            x = 100.0 * (static_cast<double>(s) / 50.0 - 1.0);
        }
        const auto qq = quantiles(xs, probs);
        iqrs.push_back(qq[1] - qq[0]);
    }
    double mean = 0, ss = 0;
    for (double v : iqrs) mean += v;
    mean /= static_cast<double>(iqrs.size());
    for (double v : iqrs) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(iqrs.size() - 1));
    EXPECT_LE(std::abs(iqr - mean), 3 * sd) << iqr << " vs " << mean;
}

TEST(Hellinger, ClosedForms) {
    const ContingencyTable t(Schema::flat(3), {0, 3, 4});
    EXPECT_EQ(hellinger(t, RealTable::from_counts(t)), 0.0);
    const std::vector<double> p{1, 0}, q{0.5, 0.5}, r{0, 1};
    EXPECT_NEAR(hellinger(p, q, HellingerBasis::probabilities), oracle::kHellingerPointVsUniform, 1e-15);
    EXPECT_NEAR(hellinger(p, r, HellingerBasis::probabilities), 1.0, 1e-15);
    const std::vector<double> z{0, 0};
    EXPECT_THROW(hellinger(z, q, HellingerBasis::probabilities), ValidationError);
    // counts basis is unnormalized
    const std::vector<double> a{4, 0}, b{0, 0};
    EXPECT_NEAR(hellinger(a, b), std::sqrt(2.0), 1e-15);
}

TEST(Euclidean, ClosedForms) {
    const ContingencyTable t(Schema::flat(3), {0, 3, 4});
    EXPECT_EQ(euclidean(t, RealTable::from_counts(t)), 0.0);
    EXPECT_DOUBLE_EQ(euclidean(t, RealTable(Schema::flat(3), {0, 0, 0})), 5.0);
}

TEST(Distances, SymmetricAndTriangle) {
    std::mt19937_64 rng(21);
    std::gamma_distribution<double> g(0.7, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> a(50), b(50), c(50);
        for (std::size_t i = 0; i < 50; ++i) {
            a[i] = g(rng);
            b[i] = g(rng);
            c[i] = g(rng);
        }
        for (auto basis : {HellingerBasis::counts, HellingerBasis::probabilities}) {
            EXPECT_NEAR(hellinger(a, b, basis), hellinger(b, a, basis), 1e-12);
            EXPECT_LE(hellinger(a, c, basis), hellinger(a, b, basis) + hellinger(b, c, basis) + 1e-12);
        }
        EXPECT_NEAR(euclidean(a, b), euclidean(b, a), 1e-12);
        EXPECT_LE(euclidean(a, c), euclidean(a, b) + euclidean(b, c) + 1e-12);
    }
}

TEST(Distances, HellingerImprovesWithM) {
    const ContingencyTable t = fixture_from_spectrum(census_spectrum(), 20000, 50, 44);
    const std::vector<std::int64_t> ms{1, 2, 5, 10, 20, 50};
    std::vector<double> means(ms.size(), 0.0);
    for (int rep = 0; rep < 20; ++rep) {
        const SyntheticEnsemble ens = synthesize(t, SynthesisParams{0.5, 0.0, 50, 1.0, static_cast<std::uint64_t>(rep)});
        for (std::size_t j = 0; j < ms.size(); ++j)
            means[j] += hellinger(t, average_ensemble(ens.prefix(static_cast<std::size_t>(ms[j])))) / 20;
    }
    // least-squares slope of means on m
    double mx = 0, my = 0;
    for (std::size_t j = 0; j < ms.size(); ++j) {
        mx += static_cast<double>(ms[j]) / static_cast<double>(ms.size());
        my += means[j] / static_cast<double>(ms.size());
    }
    double sxy = 0;
    for (std::size_t j = 0; j < ms.size(); ++j) sxy += (static_cast<double>(ms[j]) - mx) * (means[j] - my);
    EXPECT_LE(sxy, 0.0);
}

TEST(CiOverlap, Limits) {
    const IntervalEstimate o{0.0, -1.0, 1.0};
    EXPECT_DOUBLE_EQ(ci_overlap(o, o), 1.0);
    EXPECT_DOUBLE_EQ(ci_overlap(o, {5.0, 4.0, 6.0}), 0.0);
    EXPECT_NEAR(ci_overlap(o, {0.0, -10.0, 10.0}), 0.55, 1e-15);
    EXPECT_NEAR(ci_overlap(o, {0.0, -1e9, 1e9}), 0.5, 1e-6);
    EXPECT_NEAR(ci_overlap(o, {0.0, -1e-9, 1e-9}), 0.5, 1e-6);
    EXPECT_DOUBLE_EQ(ci_overlap({1, 1, 1}, {1, 1, 1}), 1.0);
    EXPECT_DOUBLE_EQ(ci_overlap({1, 1, 1}, {2, 2, 2}), 0.0);
    EXPECT_DOUBLE_EQ(ci_overlap({0.5, 0.5, 0.5}, o), 0.5);
    EXPECT_THROW(ci_overlap(o, {0.0, -1.0, 1.0, 0.9}), ValidationError);
    EXPECT_THROW(ci_overlap(o, {2.0, -1.0, 1.0}), ValidationError);
}

TEST(CiOverlap, RangeAndAffineInvariance) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int trial = 0; trial < 200; ++trial) {
        double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
        if (a > b) std::swap(a, b);
        if (c > d) std::swap(c, d);
        const IntervalEstimate x{(a + b) / 2, a, b}, y{(c + d) / 2, c, d};
        const double v = ci_overlap(x, y);
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
        const double s = 0.5 + std::abs(u(rng)), shift = u(rng);
        const auto map = [&](const IntervalEstimate& iv) {
            return IntervalEstimate{iv.point * s + shift, iv.lower * s + shift, iv.upper * s + shift};
        };
        EXPECT_NEAR(ci_overlap(map(x), map(y)), v, 1e-9);
        if (v == 1.0) EXPECT_TRUE(a == c && b == d);
    }
}

TEST(Quantiles, TypeSeven) {
    const double p[] = {0.0, 0.25, 0.5, 1.0};
    EXPECT_EQ(quantiles({4, 1, 3, 2}, p), (std::vector<double>{1, 1.75, 2.5, 4}));
    EXPECT_THROW(quantiles({}, p), ValidationError);
}

TEST(UtilityReport, Fields) {
    const ContingencyTable t(Schema::flat(3), {0, 3, 4});
    const UtilityReport r = utility_report(t, RealTable(Schema::flat(3), {0, 0, 0}));
    EXPECT_DOUBLE_EQ(r.euclidean, 5.0);
    EXPECT_DOUBLE_EQ(r.pct_diff_quantiles.at(0.5), -100.0);
    EXPECT_FALSE(r.ci_overlap);
}
