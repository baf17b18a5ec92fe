#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ctsynth/ensemble.hpp"
#include "ctsynth/table.hpp"
#include "ctsynth/utility.hpp"

namespace ctsynth {

/// Dichotomizes one variable: categories in `ones` map to 1, categories in
/// `zeros` map to 0, and every other category is filtered out.
struct BinaryPredicate {
    std::string variable;
    std::vector<std::string> ones;
    std::vector<std::string> zeros;
};

/// Keeps only cells whose `variable` takes one of `keep`.
struct CategoryFilter {
    std::string variable;
    std::vector<std::string> keep;
};

/// 2x2 marginal of a table: rows from `row`, columns from `col`.
/// For a logistic regression of a binary outcome on a binary predictor the
/// predictor is the row variable and the outcome the column variable.
struct MarginalOddsSpec {
    BinaryPredicate row;
    BinaryPredicate col;
    std::vector<CategoryFilter> filters;
};

/// n_rc with r the row indicator and c the column indicator. Real-valued so
/// that averaged tables marginalize without rounding.
struct TwoByTwo {
    double n11 = 0.0;
    double n10 = 0.0;
    double n01 = 0.0;
    double n00 = 0.0;

    double total() const noexcept { return n11 + n10 + n01 + n00; }
};

/// Per-cell quadrant assignment of a spec over a schema, reusable across
/// replicates that share the schema.
class MarginalMap {
  public:
    MarginalMap(const Schema& schema, const MarginalOddsSpec& spec);

    TwoByTwo apply(std::span<const std::int64_t> counts) const;
    TwoByTwo apply(std::span<const double> values) const;

  private:
    template <typename T>
    TwoByTwo accumulate(std::span<const T> cells) const;

    // -1 excluded, otherwise 2*row + col
    std::vector<std::int8_t> quadrant_;
};

TwoByTwo marginalize_2x2(const ContingencyTable& table, const MarginalOddsSpec& spec);
TwoByTwo marginalize_2x2(const RealTable& table, const MarginalOddsSpec& spec);

struct ReplicateEstimate {
    double q = 0.0;
    double v = 0.0;
    double n_syn = 0.0;
};

/// q = log((n11+c)(n00+c) / ((n10+c)(n01+c))), v = sum 1/(n_rc+c). This is
/// the maximum-likelihood slope of the logistic regression of the column
/// indicator on the row indicator, with its asymptotic variance. Zero cells
/// are rejected unless a continuity correction c > 0 is given.
ReplicateEstimate log_odds_ratio(const TwoByTwo& table, double correction = 0.0);

enum class Estimator { tp, ts };
enum class AnalysisMode { separate, averaged };

struct CombinedEstimate {
    double q_bar = 0.0;
    double b_m = 0.0;
    double v_bar = 0.0;
    double variance = 0.0;
    double dof = std::numeric_limits<double>::infinity();
    IntervalEstimate interval;
    Estimator estimator = Estimator::tp;
    AnalysisMode mode = AnalysisMode::separate;
    std::int64_t m = 0;
    double n_syn = 0.0;  ///< n_syn plugged into T_s (mean across replicates)
    double n = 0.0;      ///< original total used by T_s
};

/// Two-sided quantile t_{dof, (1+level)/2}; infinite dof gives the normal quantile.
double reference_quantile(double level, double dof);

/// Partially-synthetic combining rule: T_p = b_m/m + v_bar with a t
/// reference on nu_p = (m-1)(1 + m v_bar / b_m)^2 degrees of freedom.
/// Needs m >= 2; use combine_ts for a single replicate.
CombinedEstimate combine_tp(std::span<const ReplicateEstimate> estimates, double level = 0.95);

/// Completely-synthesized rule: T_s = v_bar (n_syn/n + 1/m) with a normal
/// reference.
CombinedEstimate combine_ts(double v_bar, double q_bar, std::int64_t m, double n_syn, double n,
                            double level = 0.95);

struct AnalysisOptions {
    AnalysisMode mode = AnalysisMode::separate;
    Estimator estimator = Estimator::tp;
    double level = 0.95;
    double correction = 0.0;
};

/// `separate`: per-replicate log odds ratios combined with T_p.
/// `averaged`: log odds ratio of the averaged table, its variance standing in
/// for v_bar, combined with T_s using the mean n_syn.
CombinedEstimate analyze_ensemble(const SyntheticEnsemble& ensemble, const MarginalOddsSpec& spec,
                                  const AnalysisOptions& options = {});

/// Normal-theory interval for the log odds ratio of an original table.
IntervalEstimate analyze_table(const ContingencyTable& table, const MarginalOddsSpec& spec, double level = 0.95,
                               double correction = 0.0);

}  // namespace ctsynth
