#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "ctsynth/table.hpp"

namespace ctsynth {

struct IntervalEstimate {
    double point = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double level = 0.95;

    double length() const noexcept { return upper - lower; }
    void validate() const;
};

/// 100 * (syn - f) / f for every cell with f >= min_count (min_count >= 1).
std::vector<double> percent_differences(const ContingencyTable& original, const RealTable& synthetic,
                                        std::int64_t min_count = 1);

/// Same values grouped by original cell size f.
std::map<std::int64_t, std::vector<double>> percent_differences_by_count(const ContingencyTable& original,
                                                                          const RealTable& synthetic,
                                                                          std::int64_t min_count = 1);

enum class HellingerBasis { counts, probabilities };

/// (1/sqrt 2) * sqrt(sum (sqrt a_i - sqrt b_i)^2). The probabilities basis
/// normalizes both vectors first, which bounds the result by 1.
double hellinger(std::span<const double> a, std::span<const double> b,
                 HellingerBasis basis = HellingerBasis::counts);
double hellinger(const ContingencyTable& original, const RealTable& synthetic,
                 HellingerBasis basis = HellingerBasis::counts);

double euclidean(std::span<const double> a, std::span<const double> b);
double euclidean(const ContingencyTable& original, const RealTable& synthetic);

/// Symmetric interval overlap: with L the length of the intersection,
/// 0.5 * (L / len(original) + L / len(synthetic)), floored at 0. Zero-length
/// intervals use the limit of that expression.
double ci_overlap(const IntervalEstimate& original, const IntervalEstimate& synthetic);

/// Sample quantiles by linear interpolation between order statistics
/// (Hyndman-Fan type 7).
std::vector<double> quantiles(std::vector<double> values, std::span<const double> probabilities);

struct UtilityReport {
    double hellinger = 0.0;
    double euclidean = 0.0;
    std::map<double, double> pct_diff_quantiles;
    std::optional<double> ci_overlap;
};

UtilityReport utility_report(const ContingencyTable& original, const RealTable& synthetic,
                             std::optional<std::pair<IntervalEstimate, IntervalEstimate>> intervals = std::nullopt);

}  // namespace ctsynth
