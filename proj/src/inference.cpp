#include "ctsynth/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "ctsynth/error.hpp"

namespace ctsynth {

namespace {

// role of each category of one variable: -1 filtered out, else 0/1
std::vector<int> predicate_roles(const Variable& var, const BinaryPredicate& pred) {
    require(!pred.ones.empty(), "predicate on '" + var.name() + "' assigns no category to 1");
    require(!pred.zeros.empty(), "predicate on '" + var.name() + "' assigns no category to 0");
    std::vector<int> roles(var.size(), -1);
    auto assign = [&](const std::vector<std::string>& labels, int role) {
        for (const auto& label : labels) {
            const auto idx = var.find(label);
            require(idx.has_value(), "unknown category '" + label + "' for variable '" + var.name() + "'");
            require(roles[*idx] == -1, "category '" + label + "' of '" + var.name() + "' assigned twice");
            roles[*idx] = role;
        }
    };
    assign(pred.ones, 1);
    assign(pred.zeros, 0);
    return roles;
}

}  // namespace

MarginalMap::MarginalMap(const Schema& schema, const MarginalOddsSpec& spec) {
    const std::size_t row_var = schema.variable_index(spec.row.variable);
    const std::size_t col_var = schema.variable_index(spec.col.variable);
    require(row_var != col_var, "row and column predicates use the same variable");
    const auto row_roles = predicate_roles(schema.variables()[row_var], spec.row);
    const auto col_roles = predicate_roles(schema.variables()[col_var], spec.col);

    std::vector<std::pair<std::size_t, std::vector<std::uint8_t>>> keeps;
    for (const auto& filter : spec.filters) {
        const std::size_t v = schema.variable_index(filter.variable);
        const auto& var = schema.variables()[v];
        require(!filter.keep.empty(), "filter on '" + var.name() + "' keeps no category");
        std::vector<std::uint8_t> keep(var.size(), 0);
        for (const auto& label : filter.keep) {
            const auto idx = var.find(label);
            require(idx.has_value(), "unknown category '" + label + "' for variable '" + var.name() + "'");
            keep[*idx] = 1;
        }
        keeps.emplace_back(v, std::move(keep));
    }

    quadrant_.assign(schema.cell_count(), -1);
    for (std::size_t cell = 0; cell < quadrant_.size(); ++cell) {
        const int r = row_roles[schema.category_of(cell, row_var)];
        const int c = col_roles[schema.category_of(cell, col_var)];
        if (r < 0 || c < 0) continue;
        const bool kept = std::all_of(keeps.begin(), keeps.end(), [&](const auto& f) {
            return f.second[schema.category_of(cell, f.first)] != 0;
        });
        if (kept) quadrant_[cell] = static_cast<std::int8_t>(2 * r + c);
    }
}

template <typename T>
TwoByTwo MarginalMap::accumulate(std::span<const T> cells) const {
    require(cells.size() == quadrant_.size(), "table size differs from the marginal map");
    double q[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < cells.size(); ++i)
        if (quadrant_[i] >= 0) q[quadrant_[i]] += static_cast<double>(cells[i]);
    return TwoByTwo{q[3], q[2], q[1], q[0]};
}

TwoByTwo MarginalMap::apply(std::span<const std::int64_t> counts) const { return accumulate(counts); }
TwoByTwo MarginalMap::apply(std::span<const double> values) const { return accumulate(values); }

TwoByTwo marginalize_2x2(const ContingencyTable& table, const MarginalOddsSpec& spec) {
    return MarginalMap(table.schema(), spec).apply(table.counts());
}

TwoByTwo marginalize_2x2(const RealTable& table, const MarginalOddsSpec& spec) {
    return MarginalMap(table.schema(), spec).apply(table.values());
}

ReplicateEstimate log_odds_ratio(const TwoByTwo& t, double correction) {
    require(std::isfinite(correction) && correction >= 0.0, "continuity correction must be >= 0");
    const double a = t.n11 + correction;
    const double b = t.n10 + correction;
    const double c = t.n01 + correction;
    const double d = t.n00 + correction;
    require(a > 0.0 && b > 0.0 && c > 0.0 && d > 0.0,
            "2x2 table has an empty cell; rerun with a continuity correction such as 0.5");
    return ReplicateEstimate{std::log(a) + std::log(d) - std::log(b) - std::log(c),
                             1.0 / a + 1.0 / b + 1.0 / c + 1.0 / d, t.total()};
}

double reference_quantile(double level, double dof) {
    require(level > 0.0 && level < 1.0, "confidence level must be in (0,1)");
    require(dof > 0.0, "degrees of freedom must be > 0");
    const double p = 0.5 * (1.0 + level);
    if (std::isinf(dof)) return boost::math::quantile(boost::math::normal_distribution<double>(), p);
    return boost::math::quantile(boost::math::students_t_distribution<double>(dof), p);
}

namespace {

IntervalEstimate make_interval(double centre, double variance, double level, double dof) {
    const double half = reference_quantile(level, dof) * std::sqrt(variance);
    return IntervalEstimate{centre, centre - half, centre + half, level};
}

}  // namespace

CombinedEstimate combine_tp(std::span<const ReplicateEstimate> estimates, double level) {
    const auto m = static_cast<std::int64_t>(estimates.size());
    require(m >= 2, "T_p needs m >= 2 replicates; use T_s (combine_ts) for m = 1");
    const double md = static_cast<double>(m);
    double q_bar = 0.0;
    double v_bar = 0.0;
    double n_syn = 0.0;
    for (const auto& e : estimates) {
        require(std::isfinite(e.q) && e.v >= 0.0, "replicate estimate must have finite q and v >= 0");
        q_bar += e.q;
        v_bar += e.v;
        n_syn += e.n_syn;
    }
    q_bar /= md;
    v_bar /= md;
    // identical estimates give b_m = 0 exactly, not the rounding residue of q_bar
    const bool constant = std::ranges::all_of(estimates, [&](const auto& e) { return e.q == estimates[0].q; });
    double b_m = 0.0;
    if (!constant) {
        for (const auto& e : estimates) b_m += (e.q - q_bar) * (e.q - q_bar);
        b_m /= md - 1.0;
    }

    CombinedEstimate out;
    out.q_bar = q_bar;
    out.b_m = b_m;
    out.v_bar = v_bar;
    out.variance = b_m / md + v_bar;
    out.dof = std::numeric_limits<double>::infinity();
    if (b_m > 0.0) {
        const double ratio = 1.0 + md * v_bar / b_m;
        out.dof = (md - 1.0) * ratio * ratio;
    }
    out.estimator = Estimator::tp;
    out.mode = AnalysisMode::separate;
    out.m = m;
    out.n_syn = n_syn / md;
    out.interval = make_interval(q_bar, out.variance, level, out.dof);
    return out;
}

CombinedEstimate combine_ts(double v_bar, double q_bar, std::int64_t m, double n_syn, double n, double level) {
    require(n > 0.0, "T_s needs an original sample size n > 0");
    require(m >= 1, "T_s needs m >= 1");
    require(std::isfinite(v_bar) && v_bar >= 0.0, "v_bar must be finite and >= 0");
    require(std::isfinite(n_syn) && n_syn >= 0.0, "n_syn must be finite and >= 0");
    CombinedEstimate out;
    out.q_bar = q_bar;
    out.v_bar = v_bar;
    out.variance = v_bar * (n_syn / n + 1.0 / static_cast<double>(m));
    out.estimator = Estimator::ts;
    out.mode = AnalysisMode::averaged;
    out.m = m;
    out.n_syn = n_syn;
    out.n = n;
    out.interval = make_interval(q_bar, out.variance, level, out.dof);
    return out;
}

CombinedEstimate analyze_ensemble(const SyntheticEnsemble& ensemble, const MarginalOddsSpec& spec,
                                  const AnalysisOptions& options) {
    const MarginalMap map(ensemble.schema(), spec);
    const auto m = static_cast<std::int64_t>(ensemble.m());
    if (options.mode == AnalysisMode::separate) {
        require(options.estimator == Estimator::tp, "separate analysis combines with T_p");
        std::vector<ReplicateEstimate> estimates;
        estimates.reserve(ensemble.m());
        for (std::size_t l = 0; l < ensemble.m(); ++l) {
            auto est = log_odds_ratio(map.apply(ensemble.replicate(l)), options.correction);
            est.n_syn = static_cast<double>(ensemble.n_syn()[l]);
            estimates.push_back(est);
        }
        return combine_tp(estimates, options.level);
    }
    require(options.estimator == Estimator::ts, "averaged analysis combines with T_s");
    const RealTable averaged = average_ensemble(ensemble);
    const auto est = log_odds_ratio(map.apply(averaged.values()), options.correction);
    return combine_ts(est.v, est.q, m, ensemble.mean_n_syn(), static_cast<double>(ensemble.source_total()),
                      options.level);
}

IntervalEstimate analyze_table(const ContingencyTable& table, const MarginalOddsSpec& spec, double level,
                               double correction) {
    const auto est = log_odds_ratio(marginalize_2x2(table, spec), correction);
    return make_interval(est.q, est.v, level, std::numeric_limits<double>::infinity());
}

}  // namespace ctsynth
