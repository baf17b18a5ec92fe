#include "ctsynth/tradeoff.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ctsynth/error.hpp"
#include "ctsynth/parallel.hpp"
#include "ctsynth/report_io.hpp"
#include "ctsynth/synthesis.hpp"
#include "ctsynth/utility.hpp"

namespace ctsynth {

void GridSpec::normalize() {
    require(!sigmas.empty(), "grid needs at least one sigma");
    require(!ms.empty(), "grid needs at least one m");
    for (double s : sigmas) require(std::isfinite(s) && s >= 0.0, "grid sigmas must be finite and >= 0");
    std::sort(ms.begin(), ms.end());
    ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
    require(ms.front() >= 1, "grid m values must be >= 1");
    require(replications >= 1, "replications must be >= 1");
    require(risk_band.first >= 0 && risk_band.second >= 0.0, "risk band needs k >= 0 and d >= 0");
    for (const auto& [k, d] : bands) require(k >= 0 && d >= 0.0, "bands need k >= 0 and d >= 0");
    require(level > 0.0 && level < 1.0, "level must be in (0,1)");
    SynthesisParams{0.0, alpha, 1, size_factor, 0}.validate();
}

std::uint64_t grid_job_seed(std::uint64_t master_seed, std::size_t sigma_index, std::int64_t replication) noexcept {
    return derive_seed(derive_seed(master_seed, sigma_index), static_cast<std::uint64_t>(replication));
}

namespace {

struct PrefixResult {
    double risk = 0.0;
    double utility = 0.0;
    std::vector<std::optional<double>> tau3;
    std::vector<std::optional<double>> tau4;
};

double checked_risk(std::optional<double> value, const GridSpec& grid) {
    if (!value) {
        std::ostringstream msg;
        msg << (grid.risk_metric == RiskMetric::tau3 ? "tau3" : "tau4") << "(" << grid.risk_band.first << ","
            << grid.risk_band.second << ") is undefined for this table";
        throw UndefinedMetricError(msg.str());
    }
    return *value;
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& xs) {
    MeanSe out;
    const double n = static_cast<double>(xs.size());
    for (double x : xs) out.mean += x;
    out.mean /= n;
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - out.mean) * (x - out.mean);
        out.se = std::sqrt(ss / (n - 1.0) / n);
    }
    return out;
}

std::optional<double> mean_if_defined(const std::vector<std::optional<double>>& xs) {
    double sum = 0.0;
    for (const auto& x : xs) {
        if (!x) return std::nullopt;
        sum += *x;
    }
    return sum / static_cast<double>(xs.size());
}

}  // namespace

std::vector<TradeoffPoint> evaluate_grid(const ContingencyTable& table, GridSpec grid,
                                         const std::optional<MarginalOddsSpec>& analysis) {
    grid.normalize();
    const bool want_overlap = grid.utility_metric == UtilityMetric::ci_overlap;
    require(!want_overlap || analysis.has_value(), "ci_overlap utility needs an analysis spec");
    require(!want_overlap || grid.ms.front() >= 2, "ci_overlap utility uses T_p, which needs every m >= 2");

    std::optional<MarginalMap> map;
    IntervalEstimate original_interval;
    if (want_overlap) {
        map.emplace(table.schema(), *analysis);
        original_interval = analyze_table(table, *analysis, grid.level, grid.correction);
    }

    const std::size_t n_sigma = grid.sigmas.size();
    const auto reps = static_cast<std::size_t>(grid.replications);
    const std::size_t n_m = grid.ms.size();
    const auto max_m = static_cast<std::size_t>(grid.ms.back());

    // results[job][m index], job = sigma_index * reps + replication
    std::vector<std::vector<PrefixResult>> results(n_sigma * reps, std::vector<PrefixResult>(n_m));

    parallel_for(n_sigma * reps, grid.workers, [&](std::size_t job) {
        const std::size_t s = job / reps;
        const auto r = static_cast<std::int64_t>(job % reps);
        const SynthesisParams params{grid.sigmas[s], grid.alpha, static_cast<std::int64_t>(max_m), grid.size_factor,
                                     grid_job_seed(grid.master_seed, s, r)};
        std::vector<std::int64_t> running(table.size(), 0);
        std::vector<ReplicateEstimate> estimates;
        std::size_t next_m = 0;
        for (std::size_t l = 0; l < max_m; ++l) {
            const auto rep = synthesize_once(table, params, replicate_seed(params.master_seed, l));
            for (std::size_t i = 0; i < running.size(); ++i) running[i] += rep[i];
            if (map) estimates.push_back(log_odds_ratio(map->apply(std::span<const std::int64_t>(rep)), grid.correction));

            if (static_cast<std::int64_t>(l + 1) != grid.ms[next_m]) continue;
            const double md = static_cast<double>(l + 1);
            std::vector<double> mean(running.size());
            for (std::size_t i = 0; i < mean.size(); ++i) mean[i] = static_cast<double>(running[i]) / md;
            const RealTable averaged(table.schema(), std::move(mean));

            PrefixResult& out = results[job][next_m];
            const auto [k, d] = grid.risk_band;
            out.risk = checked_risk(grid.risk_metric == RiskMetric::tau3
                                        ? tau3_empirical(table, averaged, k, d, grid.band_convention)
                                        : tau4_empirical(table, averaged, k, d, grid.band_convention),
                                    grid);
            switch (grid.utility_metric) {
                case UtilityMetric::hellinger: out.utility = hellinger(table, averaged); break;
                case UtilityMetric::euclidean: out.utility = euclidean(table, averaged); break;
                case UtilityMetric::ci_overlap:
                    out.utility = ci_overlap(original_interval, combine_tp(estimates, grid.level).interval);
                    break;
                case UtilityMetric::none: break;
            }
            for (const auto& [bk, bd] : grid.bands) {
                out.tau3.push_back(tau3_empirical(table, averaged, bk, bd, grid.band_convention));
                out.tau4.push_back(tau4_empirical(table, averaged, bk, bd, grid.band_convention));
            }
            ++next_m;
        }
    });

    std::vector<TradeoffPoint> points;
    points.reserve(n_sigma * n_m);
    for (std::size_t s = 0; s < n_sigma; ++s) {
        for (std::size_t j = 0; j < n_m; ++j) {
            std::vector<double> risks;
            std::vector<double> utils;
            for (std::size_t r = 0; r < reps; ++r) {
                risks.push_back(results[s * reps + r][j].risk);
                utils.push_back(results[s * reps + r][j].utility);
            }
            TradeoffPoint p;
            p.m = grid.ms[j];
            p.sigma = grid.sigmas[s];
            p.provenance = Provenance::empirical;
            p.replications = grid.replications;
            const auto risk = mean_se(risks);
            p.risk = risk.mean;
            p.risk_se = risk.se;
            if (grid.utility_metric != UtilityMetric::none) {
                const auto util = mean_se(utils);
                p.utility_raw = util.mean;
                p.utility_se = util.se;
            }
            for (std::size_t b = 0; b < grid.bands.size(); ++b) {
                std::vector<std::optional<double>> t3;
                std::vector<std::optional<double>> t4;
                for (std::size_t r = 0; r < reps; ++r) {
                    t3.push_back(results[s * reps + r][j].tau3[b]);
                    t4.push_back(results[s * reps + r][j].tau4[b]);
                }
                p.bands.push_back(
                    BandMean{grid.bands[b].first, grid.bands[b].second, mean_if_defined(t3), mean_if_defined(t4)});
            }
            points.push_back(std::move(p));
        }
    }

    if (grid.utility_metric == UtilityMetric::ci_overlap) {
        for (auto& p : points) p.utility = p.utility_raw;
    } else if (grid.utility_metric != UtilityMetric::none) {
        double worst = 0.0;
        for (const auto& p : points) worst = std::max(worst, *p.utility_raw);
        for (auto& p : points) p.utility = worst > 0.0 ? 1.0 - *p.utility_raw / worst : 1.0;
    }
    return points;
}

std::vector<TradeoffPoint> analytic_grid(const TauSpectrum& tau2, GridSpec grid) {
    grid.normalize();
    require(grid.utility_metric == UtilityMetric::none,
            "utility metrics need synthetic data; use evaluate_grid for utility");
    require(grid.alpha == 0.0, "analytic risk assumes alpha = 0");
    const TauSpectrum closed = materialize_tail(tau2, grid.tail_max);

    std::vector<TradeoffPoint> points;
    for (double sigma : grid.sigmas) {
        for (std::int64_t m : grid.ms) {
            TradeoffPoint p;
            p.m = m;
            p.sigma = sigma;
            p.provenance = Provenance::analytic;
            p.replications = 0;
            const TauBandQuery q{grid.risk_band.first, grid.risk_band.second, sigma, m};
            p.risk = checked_risk(grid.risk_metric == RiskMetric::tau3 ? std::optional<double>(tau3_analytic(q))
                                                                       : tau4_analytic(q, closed),
                                  grid);
            for (const auto& [k, d] : grid.bands) {
                const TauBandQuery bq{k, d, sigma, m};
                p.bands.push_back(BandMean{k, d, tau3_analytic(bq), tau4_analytic(bq, closed)});
            }
            points.push_back(std::move(p));
        }
    }
    return points;
}

std::string tradeoff_csv(const std::vector<TradeoffPoint>& points) {
    std::ostringstream out;
    out << "m,sigma,risk,risk_se,utility,utility_raw,utility_se,provenance,replications";
    if (!points.empty())
        for (const auto& b : points.front().bands) {
            const std::string key = format_number(static_cast<double>(b.k)) + ":" + format_number(b.d);
            out << ",tau3[" << key << "],tau4[" << key << "]";
        }
    out << '\n';
    const auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
    for (const auto& p : points) {
        out << p.m << ',' << format_number(p.sigma) << ',' << format_number(p.risk) << ','
            << format_number(p.risk_se) << ',' << opt(p.utility) << ',' << opt(p.utility_raw) << ','
            << (p.utility_raw ? format_number(p.utility_se) : std::string()) << ','
            << (p.provenance == Provenance::empirical ? "empirical" : "analytic") << ',' << p.replications;
        for (const auto& b : p.bands) out << ',' << opt(b.tau3) << ',' << opt(b.tau4);
        out << '\n';
    }
    return out.str();
}

}  // namespace ctsynth
