#include "ctsynth/risk.hpp"

#include <cmath>

#include "ctsynth/error.hpp"
#include "ctsynth/synthesis.hpp"

namespace ctsynth {

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

bool in_band(double value, std::int64_t k, double d, BandConvention convention) {
    const double kd = static_cast<double>(k);
    const double eps = 1e-9 * std::max(1.0, kd + d);
    if (d == 0.0) return std::abs(value - kd) <= eps;
    if (std::isinf(d)) return true;
    if (convention == BandConvention::closed) return std::abs(value - kd) <= d + eps;
    return value >= kd - d - eps && value < kd + d - eps;
}

namespace {

void check_band(std::int64_t k, double d) {
    require(k >= 0, "k must be >= 0");
    require(std::isfinite(d) ? d >= 0.0 : d > 0.0, "d must be >= 0");
}

void check_shared_schema(const ContingencyTable& original, const RealTable& averaged) {
    require(original.schema() == averaged.schema(), "original and synthetic tables have different schemas");
}

struct BandTally {
    std::size_t original_k = 0;    // f == k
    std::size_t in_band = 0;       // |syn - k| <= d
    std::size_t both = 0;          // f == k and in band
};

BandTally tally(const ContingencyTable& original, const RealTable& averaged, std::int64_t k, double d,
                BandConvention convention) {
    check_band(k, d);
    check_shared_schema(original, averaged);
    BandTally t;
    const auto f = original.counts();
    const auto v = averaged.values();
    for (std::size_t i = 0; i < f.size(); ++i) {
        const bool is_k = f[i] == k;
        const bool near = in_band(v[i], k, d, convention);
        t.original_k += is_k;
        t.in_band += near;
        t.both += is_k && near;
    }
    return t;
}

}  // namespace

std::optional<double> tau3_empirical(const ContingencyTable& original, const RealTable& averaged, std::int64_t k,
                                     double d, BandConvention convention) {
    const auto t = tally(original, averaged, k, d, convention);
    if (t.original_k == 0) return std::nullopt;
    return static_cast<double>(t.both) / static_cast<double>(t.original_k);
}

std::optional<double> tau4_empirical(const ContingencyTable& original, const RealTable& averaged, std::int64_t k,
                                     double d, BandConvention convention) {
    const auto t = tally(original, averaged, k, d, convention);
    if (t.in_band == 0) return std::nullopt;
    return static_cast<double>(t.both) / static_cast<double>(t.in_band);
}

double tau1_band(const RealTable& averaged, std::int64_t k, double d, BandConvention convention) {
    check_band(k, d);
    require(averaged.size() >= 1, "tau1 of an empty table");
    std::size_t hits = 0;
    for (double v : averaged.values()) hits += in_band(v, k, d, convention);
    return static_cast<double>(hits) / static_cast<double>(averaged.size());
}

void TauBandQuery::validate() const {
    check_band(k, d);
    require(std::isfinite(sigma) && sigma >= 0.0, "sigma must be finite and >= 0");
    require(m >= 1, "m must be >= 1");
    require(alpha == 0.0, "analytic tau metrics assume alpha = 0");
}

namespace {

double band_probability(std::int64_t centre, double d, std::int64_t source, double sigma, std::int64_t m) {
    const double i = static_cast<double>(source);
    const double sd = std::sqrt((i + sigma * i * i) / static_cast<double>(m));
    const double k = static_cast<double>(centre);
    return normal_cdf((k + d - i) / sd) - normal_cdf((k - d - i) / sd);
}

}  // namespace

double tau3_analytic(const TauBandQuery& query) {
    query.validate();
    require(query.k >= 1, "analytic tau3 needs k >= 1; with alpha = 0 zero cells stay exactly zero");
    const double kd = static_cast<double>(query.k);
    const double sd = std::sqrt((kd + query.sigma * kd * kd) / static_cast<double>(query.m));
    return 2.0 * normal_cdf(query.d / sd) - 1.0;
}

std::optional<double> tau4_analytic(const TauBandQuery& query, const TauSpectrum& tau2,
                                    Tau4AnalyticOptions options) {
    query.validate();
    tau2.validate();
    require(!tau2.open_tail, "analytic tau4 needs a closed spectrum; materialize the open tail first");
    const std::int64_t top = tau2.max_size();
    std::int64_t truncation = options.truncation == 0 ? top : options.truncation;
    require(truncation >= top, "truncation " + std::to_string(truncation) +
                                   " is below the largest cell size with positive mass (" +
                                   std::to_string(top) + ")");

    const double tau3 = tau3_analytic(query);
    const double pk = tau2.at(query.k);
    if (pk == 0.0) return 0.0;

    double denominator = 0.0;
    for (const auto& [i, p] : tau2.proportions) {
        if (i < 1 || i > truncation || p == 0.0) continue;
        denominator += band_probability(query.k, query.d, i, query.sigma, query.m) * p;
    }
    if (options.include_zero_cells && static_cast<double>(query.k) <= query.d) denominator += tau2.at(0);
    if (!(denominator > 0.0)) return std::nullopt;
    return std::min(1.0, tau3 * pk / denominator);
}

double tau3_exact_m1(std::int64_t k, double sigma) {
    require(k >= 1, "tau3_exact_m1 needs k >= 1");
    return nbi_pmf(k, static_cast<double>(k), sigma);
}

TauReport empirical_tau_report(const ContingencyTable& original, const RealTable& averaged,
                               const std::vector<Band>& bands, double sigma, std::int64_t m,
                               BandConvention convention) {
    TauReport report;
    report.mode = TauMode::empirical;
    report.sigma = sigma;
    report.m = m;
    report.tau2 = tau_spectrum(original);
    report.tau1 = tau_spectrum(averaged, Binning::unit_rounded);
    for (const auto& [k, d] : bands) {
        BandValue b{k, d, tau3_empirical(original, averaged, k, d, convention),
                    tau4_empirical(original, averaged, k, d, convention),
                    tau1_band(averaged, k, d, convention)};
        report.bands.push_back(b);
    }
    return report;
}

TauReport analytic_tau_report(const TauSpectrum& tau2, const std::vector<Band>& bands, double sigma,
                              std::int64_t m, Tau4AnalyticOptions options) {
    TauReport report;
    report.mode = TauMode::analytic;
    report.sigma = sigma;
    report.m = m;
    report.tau2 = tau2;
    for (const auto& [k, d] : bands) {
        const TauBandQuery q{k, d, sigma, m};
        report.bands.push_back(BandValue{k, d, tau3_analytic(q), tau4_analytic(q, tau2, options), std::nullopt});
    }
    return report;
}

}  // namespace ctsynth
