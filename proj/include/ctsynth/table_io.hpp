#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ctsynth/table.hpp"

namespace ctsynth {

using json = nlohmann::json;

json schema_to_json(const Schema& schema);
Schema schema_from_json(const json& j);

/// {"schema": ..., "counts": [...], "structural_zeros": [...]}; the mask is
/// written only when nonempty.
json table_to_json(const ContingencyTable& table);
ContingencyTable table_from_json(const json& j);

/// {"schema": ..., "values": [...]}
json real_table_to_json(const RealTable& table);
RealTable real_table_from_json(const json& j);

/// {"proportions": {"0": p0, "1": p1, ..., "6+": p_tail}, "total_cells": K}.
/// A "+" suffix on the largest key marks an open tail.
json spectrum_to_json(const TauSpectrum& spectrum);
TauSpectrum spectrum_from_json(const json& j);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// RFC 4180 CSV: comma separated, double-quoted fields with "" escapes,
/// LF or CRLF line ends. Blank lines are skipped.
std::vector<std::vector<std::string>> read_csv(std::istream& in);

struct Microdata {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> records;
};

Microdata read_microdata(std::istream& in);

/// Schema whose variables are the CSV columns and whose categories are the
/// observed labels, sorted.
Schema infer_schema(const Microdata& data);

/// Aggregates microdata against `schema`, matching columns by header name.
ContingencyTable aggregate_csv(const Microdata& data, const Schema& schema);

}  // namespace ctsynth
