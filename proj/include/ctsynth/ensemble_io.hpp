#pragma once

#include <filesystem>

#include "ctsynth/ensemble.hpp"
#include "ctsynth/table_io.hpp"

namespace ctsynth {

enum class EnsembleStorage { json, csv };

/// Writes `manifest.json` plus replicate data into `dir`: either one table
/// JSON file per replicate (rep_0001.json, ...) or a single columnar
/// `replicates.csv` with header cell_index,rep_1,...,rep_m.
/// Returns the manifest path.
std::filesystem::path write_ensemble(const SyntheticEnsemble& ensemble, const std::filesystem::path& dir,
                                     EnsembleStorage storage = EnsembleStorage::json);

/// Loads an ensemble through its manifest; replicate paths are resolved
/// relative to the manifest's directory.
SyntheticEnsemble read_ensemble(const std::filesystem::path& manifest);

json params_to_json(const SynthesisParams& params);
SynthesisParams params_from_json(const json& j);

}  // namespace ctsynth
