#pragma once
// Reference values and independent reference computations. Frozen constants
// were evaluated once with an external statistics package and must not be
// regenerated from this library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/negative_binomial.hpp>
#include <boost/math/distributions/poisson.hpp>

namespace oracle {

// 2 Phi(0.5) - 1: normal-approximation tau3 at k=1, sigma=1, m=50, d=0.1.
inline constexpr double kTau3Normal_k1_s1_m50_d01 = 0.38292492254802624;
// sqrt(1 - sqrt(0.5)): probability-basis Hellinger between (1,0) and (0.5,0.5).
inline constexpr double kHellingerPointVsUniform = 0.5411961001461969;
// P(Y = 1) for Y ~ NBI(1, 0.1).
inline constexpr double kPmf_y1_mu1_s01 = 0.3504938994813923;
// P(S = 5) for S a sum of 5 iid NBI(1, 0.1) draws.
inline constexpr double kSum5_y5_mu1_s01 = 0.16727622682835594;
// P(Y = 2) for Y ~ NBI(2, 0.5).
inline constexpr double kPmf_y2_mu2_s05 = 0.1875;
// Normal-approximation tau4(1, 0.5) at sigma=0.5, m=30 over the census-like
// spectrum with its open tail spread uniformly over 6..50.
inline constexpr double kTau4Census_k1_d05_s05_m30 = 0.963576548920463;
// Exact large-K limit of the closed-band empirical tau4(1, 0.5), same setting.
inline constexpr double kTau4CensusExact_k1_d05_s05_m30 = 0.9638230511787045;

/// P(S = y) where S is the sum of m iid NBI(mu, sigma) draws: negative
/// binomial with size m/sigma and success probability 1/(1 + sigma mu), or
/// Poisson(m mu) when sigma = 0.
inline double nb_sum_pmf(std::int64_t y, double mu, double sigma, std::int64_t m = 1) {
    if (sigma == 0.0) return boost::math::pdf(boost::math::poisson_distribution<>(static_cast<double>(m) * mu),
                                              static_cast<double>(y));
    const boost::math::negative_binomial_distribution<> nb(static_cast<double>(m) / sigma, 1.0 / (1.0 + sigma * mu));
    return boost::math::pdf(nb, static_cast<double>(y));
}

/// P(S/m in band around k) for S a sum of m iid NBI(i, sigma) draws.
/// Closed: |S/m - k| <= d. Half-open: k - d <= S/m < k + d.
inline double nb_sum_band_prob(std::int64_t i, std::int64_t k, double d, double sigma, std::int64_t m,
                               bool closed = true) {
    const double md = static_cast<double>(m);
    const auto lo = static_cast<std::int64_t>(std::ceil(md * (static_cast<double>(k) - d) - 1e-9));
    const auto hi = closed ? static_cast<std::int64_t>(std::floor(md * (static_cast<double>(k) + d) + 1e-9))
                           : static_cast<std::int64_t>(std::ceil(md * (static_cast<double>(k) + d) - 1e-9)) - 1;
    double p = 0.0;
    for (std::int64_t s = std::max<std::int64_t>(lo, 0); s <= hi; ++s)
        p += nb_sum_pmf(s, static_cast<double>(i), sigma, m);
    return p;
}

/// Pearson chi-square p-value. Trailing bins are merged from the right until
/// each bin expects at least 5; `expected` must sum to the number of draws.
inline double chi_square_p(std::vector<double> observed, std::vector<double> expected) {
    while (expected.size() > 1 && expected.back() < 5.0) {
        expected[expected.size() - 2] += expected.back();
        observed[observed.size() - 2] += observed.back();
        expected.pop_back();
        observed.pop_back();
    }
    double stat = 0.0;
    for (std::size_t i = 0; i < expected.size(); ++i)
        stat += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
    const boost::math::chi_squared_distribution<> chi(static_cast<double>(expected.size() - 1));
    return boost::math::cdf(boost::math::complement(chi, stat));
}

}  // namespace oracle
