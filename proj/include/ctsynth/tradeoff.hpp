#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ctsynth/inference.hpp"
#include "ctsynth/risk.hpp"
#include "ctsynth/table.hpp"

namespace ctsynth {

enum class RiskMetric { tau3, tau4 };
enum class UtilityMetric { none, hellinger, euclidean, ci_overlap };
enum class Provenance { empirical, analytic };

struct GridSpec {
    std::vector<double> sigmas{0.0, 0.1, 0.5, 2.0, 10.0};
    std::vector<std::int64_t> ms{2, 5, 10, 20, 30, 40, 50};
    /// Extra (k, d) bands reported at every point.
    std::vector<Band> bands;
    RiskMetric risk_metric = RiskMetric::tau4;
    Band risk_band{1, 0.5};
    UtilityMetric utility_metric = UtilityMetric::hellinger;
    std::int64_t replications = 1;
    std::uint64_t master_seed = 0;
    double alpha = 0.0;
    double size_factor = 1.0;
    BandConvention band_convention = BandConvention::closed;
    /// Confidence level and continuity correction of the ci_overlap analysis
    /// (separate analysis, T_p).
    double level = 0.95;
    double correction = 0.0;
    /// Tail maximum used when an open spectrum must be materialized.
    std::int64_t tail_max = kDefaultTailMax;
    unsigned workers = 1;

    /// Sorts and deduplicates `ms`, then checks every field.
    void normalize();
};

struct BandMean {
    std::int64_t k = 0;
    double d = 0.0;
    std::optional<double> tau3;
    std::optional<double> tau4;
};

struct TradeoffPoint {
    std::int64_t m = 1;
    double sigma = 0.0;
    double risk = 0.0;
    double risk_se = 0.0;
    /// In [0,1], 1 best. Hellinger and Euclidean distances are standardized
    /// as 1 - raw / (largest raw value in the grid run).
    std::optional<double> utility;
    std::optional<double> utility_raw;
    double utility_se = 0.0;  ///< standard error of utility_raw
    Provenance provenance = Provenance::empirical;
    std::int64_t replications = 1;
    std::vector<BandMean> bands;
};

/// Seed of the replicate sequence for grid job (sigma_index, replication).
/// Replicate l of that job uses replicate_seed(job_seed, l), so an ensemble
/// synthesized with master_seed = job_seed reproduces its prefixes.
std::uint64_t grid_job_seed(std::uint64_t master_seed, std::size_t sigma_index, std::int64_t replication) noexcept;

/// Generates max(ms) replicates per (sigma, replication) and evaluates the
/// selected risk and utility metrics at every m prefix. Points are ordered by
/// sigma (as given) then m (ascending), independent of the worker count.
std::vector<TradeoffPoint> evaluate_grid(const ContingencyTable& table, GridSpec grid,
                                         const std::optional<MarginalOddsSpec>& analysis = std::nullopt);

/// Risk-only grid from the normal approximations; no sampling.
std::vector<TradeoffPoint> analytic_grid(const TauSpectrum& tau2, GridSpec grid);

/// CSV rendering with a fixed column contract:
/// m,sigma,risk,risk_se,utility,utility_raw,utility_se,provenance,replications
/// followed by tau3[k:d],tau4[k:d] for each reported band.
std::string tradeoff_csv(const std::vector<TradeoffPoint>& points);

}  // namespace ctsynth
