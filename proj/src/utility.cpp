#include "ctsynth/utility.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ctsynth/error.hpp"

namespace ctsynth {

void IntervalEstimate::validate() const {
    require(std::isfinite(point) && std::isfinite(lower) && std::isfinite(upper), "interval must be finite");
    require(lower <= point && point <= upper, "interval must satisfy lower <= point <= upper");
    require(level > 0.0 && level < 1.0, "interval level must be in (0,1)");
}

namespace {

void check_shared_schema(const ContingencyTable& original, const RealTable& synthetic) {
    require(original.schema() == synthetic.schema(), "original and synthetic tables have different schemas");
}

std::vector<double> as_doubles(const ContingencyTable& t) {
    return {t.counts().begin(), t.counts().end()};
}

}  // namespace

std::vector<double> percent_differences(const ContingencyTable& original, const RealTable& synthetic,
                                        std::int64_t min_count) {
    check_shared_schema(original, synthetic);
    require(min_count >= 1, "min_count must be >= 1");
    std::vector<double> out;
    for (std::size_t i = 0; i < original.size(); ++i) {
        const auto f = original.count(i);
        if (f < min_count) continue;
        const double fd = static_cast<double>(f);
        out.push_back(100.0 * (synthetic.value(i) - fd) / fd);
    }
    return out;
}

std::map<std::int64_t, std::vector<double>> percent_differences_by_count(const ContingencyTable& original,
                                                                          const RealTable& synthetic,
                                                                          std::int64_t min_count) {
    check_shared_schema(original, synthetic);
    require(min_count >= 1, "min_count must be >= 1");
    std::map<std::int64_t, std::vector<double>> out;
    for (std::size_t i = 0; i < original.size(); ++i) {
        const auto f = original.count(i);
        if (f < min_count) continue;
        const double fd = static_cast<double>(f);
        out[f].push_back(100.0 * (synthetic.value(i) - fd) / fd);
    }
    return out;
}

double hellinger(std::span<const double> a, std::span<const double> b, HellingerBasis basis) {
    require(a.size() == b.size(), "hellinger: vectors differ in length");
    double scale_a = 1.0;
    double scale_b = 1.0;
    if (basis == HellingerBasis::probabilities) {
        const double ta = std::accumulate(a.begin(), a.end(), 0.0);
        const double tb = std::accumulate(b.begin(), b.end(), 0.0);
        require(ta > 0.0 && tb > 0.0, "hellinger on probabilities needs nonzero tables");
        scale_a = 1.0 / ta;
        scale_b = 1.0 / tb;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = std::sqrt(a[i] * scale_a) - std::sqrt(b[i] * scale_b);
        sum += diff * diff;
    }
    return std::sqrt(sum) / std::sqrt(2.0);
}

double hellinger(const ContingencyTable& original, const RealTable& synthetic, HellingerBasis basis) {
    check_shared_schema(original, synthetic);
    return hellinger(as_doubles(original), synthetic.values(), basis);
}

double euclidean(std::span<const double> a, std::span<const double> b) {
    require(a.size() == b.size(), "euclidean: vectors differ in length");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

double euclidean(const ContingencyTable& original, const RealTable& synthetic) {
    check_shared_schema(original, synthetic);
    return euclidean(as_doubles(original), synthetic.values());
}

double ci_overlap(const IntervalEstimate& original, const IntervalEstimate& synthetic) {
    original.validate();
    synthetic.validate();
    require(original.level == synthetic.level, "overlap needs intervals at the same level");

    const double lo = original.length();
    const double ls = synthetic.length();
    const auto contains = [](const IntervalEstimate& iv, double x) { return iv.lower <= x && x <= iv.upper; };

    if (lo == 0.0 && ls == 0.0) return original.lower == synthetic.lower ? 1.0 : 0.0;
    // A zero-length interval inside the other scores 1 on its own side and
    // 0 on the other in the limit.
    if (lo == 0.0) return contains(synthetic, original.lower) ? 0.5 : 0.0;
    if (ls == 0.0) return contains(original, synthetic.lower) ? 0.5 : 0.0;

    const double inter = std::max(0.0, std::min(original.upper, synthetic.upper) -
                                           std::max(original.lower, synthetic.lower));
    return 0.5 * (inter / lo + inter / ls);
}

std::vector<double> quantiles(std::vector<double> values, std::span<const double> probabilities) {
    require(!values.empty(), "quantiles of an empty sample");
    std::sort(values.begin(), values.end());
    std::vector<double> out;
    out.reserve(probabilities.size());
    const double last = static_cast<double>(values.size() - 1);
    for (double p : probabilities) {
        require(p >= 0.0 && p <= 1.0, "quantile probability outside [0,1]");
        const double h = last * p;
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const auto hi = std::min(lo + 1, values.size() - 1);
        out.push_back(values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]));
    }
    return out;
}

UtilityReport utility_report(const ContingencyTable& original, const RealTable& synthetic,
                             std::optional<std::pair<IntervalEstimate, IntervalEstimate>> intervals) {
    UtilityReport r;
    r.hellinger = hellinger(original, synthetic);
    r.euclidean = euclidean(original, synthetic);
    auto pct = percent_differences(original, synthetic);
    if (!pct.empty()) {
        static constexpr double probs[] = {0.0, 0.25, 0.5, 0.75, 1.0};
        const auto q = quantiles(std::move(pct), probs);
        for (std::size_t i = 0; i < q.size(); ++i) r.pct_diff_quantiles[probs[i]] = q[i];
    }
    if (intervals) r.ci_overlap = ci_overlap(intervals->first, intervals->second);
    return r;
}

}  // namespace ctsynth
