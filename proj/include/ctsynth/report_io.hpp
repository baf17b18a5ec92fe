#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ctsynth/inference.hpp"
#include "ctsynth/risk.hpp"
#include "ctsynth/table_io.hpp"
#include "ctsynth/tradeoff.hpp"
#include "ctsynth/utility.hpp"

namespace ctsynth {

/// Shortest decimal that round-trips to the same double.
std::string format_number(double value);

/// "k:d" key used for band-indexed maps.
std::string band_key(std::int64_t k, double d);

/// tau3/tau4 are maps keyed by "k:d"; undefined values are null.
json tau_report_to_json(const TauReport& report);
/// Header k,d,sigma,m,tau3,tau4,mode; undefined values print as NA.
std::string tau_report_csv(const std::vector<TauReport>& reports);

json utility_report_to_json(const UtilityReport& report);

json estimate_to_json(const CombinedEstimate& estimate);
json interval_to_json(const IntervalEstimate& interval);

MarginalOddsSpec analysis_spec_from_json(const json& j);
json analysis_spec_to_json(const MarginalOddsSpec& spec);

/// Fields mirror GridSpec; omitted fields keep their defaults.
GridSpec grid_spec_from_json(const json& j);

json tradeoff_points_to_json(const std::vector<TradeoffPoint>& points);

}  // namespace ctsynth
