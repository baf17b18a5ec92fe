#include "ctsynth/report_io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "ctsynth/error.hpp"

namespace ctsynth {

std::string format_number(double value) {
    if (std::isnan(value)) return "NaN";
    if (std::isinf(value)) return value > 0 ? "Inf" : "-Inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, end);
}

std::string band_key(std::int64_t k, double d) {
    return std::to_string(k) + ":" + format_number(d);
}

namespace {

json optional_number(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

const char* mode_name(TauMode mode) { return mode == TauMode::empirical ? "empirical" : "analytic"; }

}  // namespace

json tau_report_to_json(const TauReport& report) {
    json tau3 = json::object();
    json tau4 = json::object();
    json tau1 = json::object();
    for (const auto& b : report.bands) {
        const auto key = band_key(b.k, b.d);
        tau3[key] = optional_number(b.tau3);
        tau4[key] = optional_number(b.tau4);
        if (b.tau1) tau1[key] = *b.tau1;
    }
    json j{{"mode", mode_name(report.mode)},
           {"sigma", report.sigma},
           {"m", report.m},
           {"tau2", spectrum_to_json(report.tau2)},
           {"tau3", std::move(tau3)},
           {"tau4", std::move(tau4)}};
    if (report.mode == TauMode::empirical) {
        j["tau1"] = spectrum_to_json(report.tau1);
        j["tau1_band"] = std::move(tau1);
    }
    return j;
}

std::string tau_report_csv(const std::vector<TauReport>& reports) {
    std::ostringstream out;
    out << "k,d,sigma,m,tau3,tau4,mode\n";
    const auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string("NA"); };
    for (const auto& r : reports)
        for (const auto& b : r.bands)
            out << b.k << ',' << format_number(b.d) << ',' << format_number(r.sigma) << ',' << r.m << ','
                << opt(b.tau3) << ',' << opt(b.tau4) << ',' << mode_name(r.mode) << '\n';
    return out.str();
}

json utility_report_to_json(const UtilityReport& report) {
    json q = json::object();
    for (const auto& [p, v] : report.pct_diff_quantiles) q[format_number(p)] = v;
    return json{{"hellinger", report.hellinger},
                {"euclidean", report.euclidean},
                {"pct_diff_quantiles", std::move(q)},
                {"ci_overlap", optional_number(report.ci_overlap)}};
}

json interval_to_json(const IntervalEstimate& iv) {
    return json{{"point", iv.point}, {"lower", iv.lower}, {"upper", iv.upper}, {"level", iv.level}};
}

json estimate_to_json(const CombinedEstimate& e) {
    return json{{"q_bar", e.q_bar},
                {"b_m", e.b_m},
                {"v_bar", e.v_bar},
                {"variance", e.variance},
                {"dof", std::isinf(e.dof) ? json("inf") : json(e.dof)},
                {"lower", e.interval.lower},
                {"upper", e.interval.upper},
                {"level", e.interval.level},
                {"estimator", e.estimator == Estimator::tp ? "tp" : "ts"},
                {"mode", e.mode == AnalysisMode::separate ? "separate" : "averaged"},
                {"m", e.m},
                {"n_syn", e.n_syn},
                {"n", e.n}};
}

namespace {

BinaryPredicate predicate_from_json(const json& j) {
    BinaryPredicate p;
    p.variable = j.at("variable").get<std::string>();
    p.ones = j.at("ones").get<std::vector<std::string>>();
    p.zeros = j.at("zeros").get<std::vector<std::string>>();
    return p;
}

json predicate_to_json(const BinaryPredicate& p) {
    return json{{"variable", p.variable}, {"ones", p.ones}, {"zeros", p.zeros}};
}

}  // namespace

MarginalOddsSpec analysis_spec_from_json(const json& j) {
    try {
        MarginalOddsSpec spec;
        spec.row = predicate_from_json(j.at("row"));
        spec.col = predicate_from_json(j.at("col"));
        if (j.contains("filters"))
            for (const auto& f : j.at("filters"))
                spec.filters.push_back({f.at("variable").get<std::string>(), f.at("keep").get<std::vector<std::string>>()});
        return spec;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("analysis spec: ") + e.what());
    }
}

json analysis_spec_to_json(const MarginalOddsSpec& spec) {
    json filters = json::array();
    for (const auto& f : spec.filters) filters.push_back({{"variable", f.variable}, {"keep", f.keep}});
    return json{{"row", predicate_to_json(spec.row)}, {"col", predicate_to_json(spec.col)}, {"filters", filters}};
}

namespace {

Band band_from_json(const json& j) {
    if (j.is_array()) return {j.at(0).get<std::int64_t>(), j.at(1).get<double>()};
    return {j.at("k").get<std::int64_t>(), j.at("d").get<double>()};
}

}  // namespace

GridSpec grid_spec_from_json(const json& j) {
    GridSpec g;
    try {
        if (j.contains("sigmas")) g.sigmas = j.at("sigmas").get<std::vector<double>>();
        if (j.contains("ms")) g.ms = j.at("ms").get<std::vector<std::int64_t>>();
        if (j.contains("bands"))
            for (const auto& b : j.at("bands")) g.bands.push_back(band_from_json(b));
        if (j.contains("risk")) {
            const auto& r = j.at("risk");
            const auto metric = r.value("metric", std::string("tau4"));
            require(metric == "tau3" || metric == "tau4", "risk metric must be tau3 or tau4");
            g.risk_metric = metric == "tau3" ? RiskMetric::tau3 : RiskMetric::tau4;
            g.risk_band = {r.value("k", std::int64_t{1}), r.value("d", 0.5)};
        }
        if (j.contains("utility")) {
            const auto u = j.at("utility").get<std::string>();
            if (u == "hellinger") g.utility_metric = UtilityMetric::hellinger;
            else if (u == "euclidean") g.utility_metric = UtilityMetric::euclidean;
            else if (u == "ci_overlap") g.utility_metric = UtilityMetric::ci_overlap;
            else if (u == "none") g.utility_metric = UtilityMetric::none;
            else throw ValidationError("utility metric must be hellinger, euclidean, ci_overlap or none");
        }
        g.replications = j.value("replications", g.replications);
        g.master_seed = j.value("seed", g.master_seed);
        g.alpha = j.value("alpha", g.alpha);
        g.size_factor = j.value("size_factor", g.size_factor);
        g.level = j.value("level", g.level);
        g.correction = j.value("correction", g.correction);
        g.tail_max = j.value("tail_max", g.tail_max);
        if (j.contains("band_convention")) {
            const auto c = j.at("band_convention").get<std::string>();
            require(c == "closed" || c == "half-open", "band_convention must be closed or half-open");
            g.band_convention = c == "closed" ? BandConvention::closed : BandConvention::half_open;
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("grid spec: ") + e.what());
    }
    return g;
}

json tradeoff_points_to_json(const std::vector<TradeoffPoint>& points) {
    json out = json::array();
    for (const auto& p : points) {
        json bands = json::array();
        for (const auto& b : p.bands)
            bands.push_back({{"k", b.k}, {"d", b.d}, {"tau3", optional_number(b.tau3)}, {"tau4", optional_number(b.tau4)}});
        out.push_back({{"m", p.m},
                       {"sigma", p.sigma},
                       {"risk", p.risk},
                       {"risk_se", p.risk_se},
                       {"utility", optional_number(p.utility)},
                       {"utility_raw", optional_number(p.utility_raw)},
                       {"utility_se", p.utility_se},
                       {"provenance", p.provenance == Provenance::empirical ? "empirical" : "analytic"},
                       {"replications", p.replications},
                       {"bands", std::move(bands)}});
    }
    return out;
}

}  // namespace ctsynth
