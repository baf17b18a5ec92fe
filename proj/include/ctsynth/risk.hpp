#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ctsynth/table.hpp"

namespace ctsynth {

/// How |value - k| <= d is evaluated on synthetic cell values.
///
/// `closed` is the band [k-d, k+d]. `half_open` is [k-d, k+d), the event
/// whose probability the normal approximation
/// Phi((k+d-k)/s) - Phi((k-d-k)/s) computes exactly; it matters because
/// averaged counts live on the lattice {0, 1/m, 2/m, ...} and the closed
/// band picks up an extra lattice point whenever m*d is an integer. At d == 0
/// both conventions reduce to the point {k}.
enum class BandConvention { closed, half_open };

/// Membership test with a 1e-9 slack on the bounds, so a mean such as 33/30
/// counts as exactly k + 0.1.
bool in_band(double value, std::int64_t k, double d, BandConvention convention = BandConvention::closed);

/// Share of original k-cells whose averaged synthetic value is within d of k.
/// Empty when the original table has no k-cells.
std::optional<double> tau3_empirical(const ContingencyTable& original, const RealTable& averaged, std::int64_t k,
                                     double d, BandConvention convention = BandConvention::closed);

/// Share of synthetic values within d of k that came from an original k-cell.
/// Empty when no synthetic value falls in the band.
std::optional<double> tau4_empirical(const ContingencyTable& original, const RealTable& averaged, std::int64_t k,
                                     double d, BandConvention convention = BandConvention::closed);

/// Share of all cells whose synthetic value is within d of k.
double tau1_band(const RealTable& averaged, std::int64_t k, double d,
                 BandConvention convention = BandConvention::closed);

struct TauBandQuery {
    std::int64_t k = 1;
    double d = 0.0;
    double sigma = 0.0;
    std::int64_t m = 1;
    double alpha = 0.0;  ///< analytic formulas assume alpha == 0 and reject anything else

    void validate() const;
};

/// Large-m normal approximation 2 Phi(d / sqrt((k + sigma k^2) / m)) - 1.
double tau3_analytic(const TauBandQuery& query);

struct Tau4AnalyticOptions {
    /// Largest original cell size summed in the denominator; 0 means the
    /// largest size with positive mass in the spectrum.
    std::int64_t truncation = 0;
    /// Adds tau2(0) * 1{k <= d}: with alpha == 0 zero cells average to
    /// exactly 0, which lies in the band only when k <= d.
    bool include_zero_cells = false;
};

/// Normal-approximation tau4(k, d) from an original-size spectrum. Returns
/// 0 when tau2(k) == 0 and empty when the denominator vanishes. The spectrum
/// must be closed (see materialize_tail).
std::optional<double> tau4_analytic(const TauBandQuery& query, const TauSpectrum& tau2,
                                    Tau4AnalyticOptions options = {});

/// Exact single-replicate tau3(k) = P(f_syn = k | f = k) = nbi_pmf(k, k, sigma).
double tau3_exact_m1(std::int64_t k, double sigma);

enum class TauMode { empirical, analytic };

struct BandValue {
    std::int64_t k = 0;
    double d = 0.0;
    std::optional<double> tau3;
    std::optional<double> tau4;
    std::optional<double> tau1;  ///< empirical only
};

struct TauReport {
    TauSpectrum tau1;  ///< synthetic spectrum (unit-rounded); empty in analytic mode
    TauSpectrum tau2;
    std::vector<BandValue> bands;
    TauMode mode = TauMode::empirical;
    double sigma = 0.0;
    std::int64_t m = 1;
};

using Band = std::pair<std::int64_t, double>;

TauReport empirical_tau_report(const ContingencyTable& original, const RealTable& averaged,
                               const std::vector<Band>& bands, double sigma, std::int64_t m,
                               BandConvention convention = BandConvention::closed);

TauReport analytic_tau_report(const TauSpectrum& tau2, const std::vector<Band>& bands, double sigma,
                              std::int64_t m, Tau4AnalyticOptions options = {});

/// Standard normal CDF.
double normal_cdf(double x);

}  // namespace ctsynth
