// ctsynth: contingency-table synthesis, risk and utility from the command line.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "ctsynth/ensemble_io.hpp"
#include "ctsynth/error.hpp"
#include "ctsynth/inference.hpp"
#include "ctsynth/report_io.hpp"
#include "ctsynth/risk.hpp"
#include "ctsynth/synthesis.hpp"
#include "ctsynth/table_io.hpp"
#include "ctsynth/tradeoff.hpp"
#include "ctsynth/utility.hpp"

namespace fs = std::filesystem;
using namespace ctsynth;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitUndefined = 3;

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-")
        std::cout << text;
    else
        write_text_file(path, text);
}

BandConvention parse_band(const std::string& s) {
    return s == "half-open" ? BandConvention::half_open : BandConvention::closed;
}

/// Pairs --k and --d values; a single value on either side is broadcast.
std::vector<Band> pair_bands(const std::vector<std::int64_t>& ks, const std::vector<double>& ds) {
    require(!ks.empty() && !ds.empty(), "need at least one --k and one --d");
    require(ks.size() == ds.size() || ks.size() == 1 || ds.size() == 1,
            "--k and --d must have equal counts or one of them a single value");
    const std::size_t n = std::max(ks.size(), ds.size());
    std::vector<Band> out;
    for (std::size_t i = 0; i < n; ++i)
        out.emplace_back(ks[ks.size() == 1 ? 0 : i], ds[ds.size() == 1 ? 0 : i]);
    return out;
}

struct Options {
    // shared
    std::string table, ensemble, output, json_output, analysis, spectrum, grid, schema, input;
    double sigma = 0.0;
    double alpha = 0.0;
    std::int64_t m = 1;
    double size_factor = 1.0;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    std::string mode, estimator;
    double level = 0.95;
    double correction = 0.0;
    std::int64_t truncation = 0;
    std::vector<std::int64_t> ks;
    std::vector<double> ds;
    std::string band = "closed";
    bool include_zero_cells = false;
    bool analytic = false;
    std::int64_t tail_max = kDefaultTailMax;
    std::string format = "json";
    std::string csv_append;
    // fixture
    std::size_t cells = 0;
    std::vector<std::size_t> dims;
    // tradeoff overrides
    std::optional<std::int64_t> replications;
    std::int64_t min_count = 1;
};

int cmd_aggregate(const Options& o) {
    std::ifstream in(o.input, std::ios::binary);
    require(in.good(), "cannot open " + o.input);
    const Microdata data = read_microdata(in);
    const Schema schema = o.schema.empty() ? infer_schema(data) : schema_from_json(read_json_file(o.schema));
    const ContingencyTable table = aggregate_csv(data, schema);
    emit(o.output, table_to_json(table).dump(2) + "\n");
    return 0;
}

int cmd_fixture(const Options& o) {
    const TauSpectrum spectrum = o.spectrum.empty() ? census_spectrum() : spectrum_from_json(read_json_file(o.spectrum));
    ContingencyTable table = [&] {
        if (!o.dims.empty()) return fixture_from_spectrum(spectrum, Schema::grid(o.dims), o.tail_max, o.seed);
        require(o.cells > 0, "fixture needs --cells K > 0 or --dims");
        return fixture_from_spectrum(spectrum, o.cells, o.tail_max, o.seed);
    }();
    emit(o.output, table_to_json(table).dump() + "\n");
    return 0;
}

int cmd_synthesize(const Options& o) {
    const ContingencyTable table = table_from_json(read_json_file(o.table));
    const SynthesisParams params{o.sigma, o.alpha, o.m, o.size_factor, o.seed};
    const SyntheticEnsemble ensemble = synthesize(table, params, o.workers);
    require(!o.output.empty(), "synthesize needs --out-dir");
    const auto manifest =
        write_ensemble(ensemble, o.output, o.format == "csv" ? EnsembleStorage::csv : EnsembleStorage::json);
    std::cout << "wrote " << ensemble.m() << " replicates, mean n_syn " << format_number(ensemble.mean_n_syn())
              << " (n = " << table.total() << "), manifest " << manifest.string() << "\n";
    return 0;
}

int cmd_risk(const Options& o) {
    const auto bands = pair_bands(o.ks, o.ds);
    TauReport report;
    if (o.analytic) {
        TauSpectrum tau2 = !o.spectrum.empty() ? spectrum_from_json(read_json_file(o.spectrum))
                                               : tau_spectrum(table_from_json(read_json_file(o.table)));
        tau2 = materialize_tail(tau2, o.tail_max);
        report = analytic_tau_report(tau2, bands, o.sigma, o.m,
                                     Tau4AnalyticOptions{o.truncation, o.include_zero_cells});
    } else {
        require(!o.ensemble.empty(), "empirical risk needs --ensemble (or pass --analytic)");
        const ContingencyTable original = table_from_json(read_json_file(o.table));
        const SyntheticEnsemble ens = read_ensemble(o.ensemble);
        report = empirical_tau_report(original, average_ensemble(ens), bands, ens.params().sigma,
                                      static_cast<std::int64_t>(ens.m()), parse_band(o.band));
    }
    emit(o.output, tau_report_csv({report}));
    if (!o.json_output.empty()) write_json_file(o.json_output, tau_report_to_json(report));
    for (const auto& b : report.bands) {
        if (!b.tau3 || !b.tau4) {
            std::cerr << "undefined metric at k=" << b.k << ", d=" << format_number(b.d) << "\n";
            return kExitUndefined;
        }
    }
    return 0;
}

AnalysisOptions analysis_options(const Options& o, std::size_t m) {
    AnalysisOptions a;
    a.level = o.level;
    a.correction = o.correction;
    const bool separate = o.mode.empty() ? m >= 2 : o.mode == "separate";
    a.mode = separate ? AnalysisMode::separate : AnalysisMode::averaged;
    if (o.estimator.empty())
        a.estimator = separate ? Estimator::tp : Estimator::ts;
    else
        a.estimator = o.estimator == "tp" ? Estimator::tp : Estimator::ts;
    return a;
}

int cmd_utility(const Options& o) {
    const ContingencyTable original = table_from_json(read_json_file(o.table));
    const SyntheticEnsemble ens = read_ensemble(o.ensemble);
    const RealTable averaged = average_ensemble(ens);
    std::optional<std::pair<IntervalEstimate, IntervalEstimate>> intervals;
    if (!o.analysis.empty()) {
        const auto spec = analysis_spec_from_json(read_json_file(o.analysis));
        const auto opts = analysis_options(o, ens.m());
        intervals.emplace(analyze_table(original, spec, o.level, o.correction),
                          analyze_ensemble(ens, spec, opts).interval);
    }
    UtilityReport report = utility_report(original, averaged, intervals);
    if (o.min_count != 1) {
        report.pct_diff_quantiles.clear();
        auto pct = percent_differences(original, averaged, o.min_count);
        static constexpr double probs[] = {0.0, 0.25, 0.5, 0.75, 1.0};
        if (!pct.empty()) {
            const auto q = quantiles(std::move(pct), probs);
            for (std::size_t i = 0; i < q.size(); ++i) report.pct_diff_quantiles[probs[i]] = q[i];
        }
    }
    std::ostringstream csv;
    csv << "sigma,m,hellinger,euclidean,ci_overlap\n"
        << format_number(ens.params().sigma) << ',' << ens.m() << ',' << format_number(report.hellinger) << ','
        << format_number(report.euclidean) << ',' << (report.ci_overlap ? format_number(*report.ci_overlap) : "NA")
        << '\n';
    emit(o.output, csv.str());
    if (!o.json_output.empty()) write_json_file(o.json_output, utility_report_to_json(report));
    return 0;
}

int cmd_analyze(const Options& o) {
    const SyntheticEnsemble ens = read_ensemble(o.ensemble);
    const auto spec = analysis_spec_from_json(read_json_file(o.analysis));
    const CombinedEstimate est = analyze_ensemble(ens, spec, analysis_options(o, ens.m()));
    const std::string estimator = est.estimator == Estimator::tp ? "T_p" : "T_s";
    std::cout << "q_bar=" << format_number(est.q_bar) << " " << estimator << "=" << format_number(est.variance)
              << " dof=" << format_number(est.dof) << " " << format_number(est.interval.level * 100) << "% CI ["
              << format_number(est.interval.lower) << ", " << format_number(est.interval.upper) << "]\n";
    if (!o.output.empty()) write_json_file(o.output, estimate_to_json(est));
    if (!o.csv_append.empty()) {
        const bool fresh = !fs::exists(o.csv_append) || fs::file_size(o.csv_append) == 0;
        std::ofstream out(o.csv_append, std::ios::app | std::ios::binary);
        if (fresh) out << "sigma,m,mode,estimator,q_bar,b_m,v_bar,variance,dof,lower,upper\n";
        out << format_number(ens.params().sigma) << ',' << est.m << ','
            << (est.mode == AnalysisMode::separate ? "separate" : "averaged") << ','
            << (est.estimator == Estimator::tp ? "tp" : "ts") << ',' << format_number(est.q_bar) << ','
            << format_number(est.b_m) << ',' << format_number(est.v_bar) << ',' << format_number(est.variance) << ','
            << format_number(est.dof) << ',' << format_number(est.interval.lower) << ','
            << format_number(est.interval.upper) << '\n';
    }
    return 0;
}

int cmd_tradeoff(const Options& o) {
    GridSpec grid = o.grid.empty() ? GridSpec{} : grid_spec_from_json(read_json_file(o.grid));
    grid.workers = o.workers;
    if (o.replications) grid.replications = *o.replications;
    std::vector<TradeoffPoint> points;
    if (o.analytic) {
        grid.utility_metric = UtilityMetric::none;
        const TauSpectrum tau2 = !o.spectrum.empty() ? spectrum_from_json(read_json_file(o.spectrum))
                                                     : tau_spectrum(table_from_json(read_json_file(o.table)));
        points = analytic_grid(tau2, grid);
    } else {
        const ContingencyTable table = table_from_json(read_json_file(o.table));
        std::optional<MarginalOddsSpec> spec;
        if (!o.analysis.empty()) spec = analysis_spec_from_json(read_json_file(o.analysis));
        points = evaluate_grid(table, grid, spec);
    }
    emit(o.output, tradeoff_csv(points));
    if (!o.json_output.empty()) write_json_file(o.json_output, tradeoff_points_to_json(points));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Contingency-table synthesis with saturated negative binomial models"};
    app.require_subcommand(1);
    Options o;

    auto* agg = app.add_subcommand("aggregate", "CSV microdata -> table JSON");
    agg->add_option("--input,-i", o.input, "microdata CSV with a header row")->required();
    agg->add_option("--schema", o.schema, "schema JSON fixing variable and category order");
    agg->add_option("--output,-o", o.output, "table JSON (default stdout)");

    auto* fix = app.add_subcommand("fixture", "spectrum JSON -> synthetic original table JSON");
    fix->add_option("--spectrum", o.spectrum, "spectrum JSON (default: census-like built-in spectrum)");
    fix->add_option("--cells,-K", o.cells, "number of cells (single indexed variable)");
    fix->add_option("--dims", o.dims, "category counts of indexed variables v1..vp")->delimiter(',');
    fix->add_option("--max-count", o.tail_max, "upper end of the open tail")->capture_default_str();
    fix->add_option("--seed", o.seed)->capture_default_str();
    fix->add_option("--output,-o", o.output, "table JSON (default stdout)");

    auto* syn = app.add_subcommand("synthesize", "table + params -> ensemble");
    syn->add_option("--table,-t", o.table)->required();
    syn->add_option("--sigma", o.sigma)->capture_default_str();
    syn->add_option("--alpha", o.alpha)->capture_default_str();
    syn->add_option("-m", o.m)->capture_default_str();
    syn->add_option("--size-factor", o.size_factor)->capture_default_str();
    syn->add_option("--seed", o.seed)->capture_default_str();
    syn->add_option("--workers", o.workers, "0 = all hardware threads")->capture_default_str();
    syn->add_option("--out-dir,-o", o.output)->required();
    syn->add_option("--format", o.format, "json | csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

    auto* risk = app.add_subcommand("risk", "tau metrics -> CSV");
    risk->add_option("--table,-t", o.table);
    risk->add_option("--ensemble,-e", o.ensemble, "ensemble manifest");
    risk->add_flag("--analytic", o.analytic, "normal-approximation metrics from the table's spectrum");
    risk->add_option("--spectrum", o.spectrum, "spectrum JSON for --analytic instead of --table");
    risk->add_option("--sigma", o.sigma)->capture_default_str();
    risk->add_option("-m", o.m)->capture_default_str();
    risk->add_option("--k", o.ks)->required();
    risk->add_option("--d", o.ds)->required();
    risk->add_option("--truncation", o.truncation, "0 = largest observed cell size")->capture_default_str();
    risk->add_option("--tail-max", o.tail_max)->capture_default_str();
    risk->add_flag("--include-zero-cells", o.include_zero_cells);
    risk->add_option("--band", o.band, "closed | half-open")->check(CLI::IsMember({"closed", "half-open"}));
    risk->add_option("--output,-o", o.output, "CSV (default stdout)");
    risk->add_option("--json", o.json_output, "also write the report as JSON");

    auto* util = app.add_subcommand("utility", "table + ensemble -> utility CSV");
    util->add_option("--table,-t", o.table)->required();
    util->add_option("--ensemble,-e", o.ensemble)->required();
    util->add_option("--analysis", o.analysis, "analysis spec JSON enabling ci_overlap");
    util->add_option("--mode", o.mode)->check(CLI::IsMember({"separate", "averaged"}));
    util->add_option("--estimator", o.estimator)->check(CLI::IsMember({"tp", "ts"}));
    util->add_option("--level", o.level)->capture_default_str();
    util->add_option("--correction", o.correction)->capture_default_str();
    util->add_option("--min-count", o.min_count)->capture_default_str();
    util->add_option("--output,-o", o.output, "CSV (default stdout)");
    util->add_option("--json", o.json_output);

    auto* an = app.add_subcommand("analyze", "ensemble + analysis spec -> estimate JSON");
    an->add_option("--ensemble,-e", o.ensemble)->required();
    an->add_option("--analysis", o.analysis)->required();
    an->add_option("--mode", o.mode)->check(CLI::IsMember({"separate", "averaged"}));
    an->add_option("--estimator", o.estimator)->check(CLI::IsMember({"tp", "ts"}));
    an->add_option("--level", o.level)->capture_default_str();
    an->add_option("--correction", o.correction)->capture_default_str();
    an->add_option("--output,-o", o.output, "estimate JSON");
    an->add_option("--csv", o.csv_append, "append a CSV row to this file");

    auto* tr = app.add_subcommand("tradeoff", "table + grid spec -> trade-off points CSV");
    tr->add_option("--table,-t", o.table);
    tr->add_option("--grid,-g", o.grid, "grid spec JSON");
    tr->add_option("--analysis", o.analysis, "analysis spec JSON for ci_overlap utility");
    tr->add_flag("--analytic", o.analytic, "risk-only grid from the normal approximations");
    tr->add_option("--spectrum", o.spectrum);
    tr->add_option("--replications", o.replications);
    tr->add_option("--workers", o.workers)->capture_default_str();
    tr->add_option("--output,-o", o.output, "CSV (default stdout)");
    tr->add_option("--json", o.json_output);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (*agg) return cmd_aggregate(o);
        if (*fix) return cmd_fixture(o);
        if (*syn) return cmd_synthesize(o);
        if (*risk) return cmd_risk(o);
        if (*util) return cmd_utility(o);
        if (*an) return cmd_analyze(o);
        if (*tr) return cmd_tradeoff(o);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const UndefinedMetricError& e) {
        std::cerr << "undefined: " << e.what() << "\n";
        return kExitUndefined;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
