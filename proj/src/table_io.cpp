#include "ctsynth/table_io.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <set>

#include "ctsynth/error.hpp"

namespace ctsynth {

namespace {

const json& field(const json& j, const char* name) {
    require(j.is_object(), std::string("expected a JSON object holding '") + name + "'");
    auto it = j.find(name);
    require(it != j.end(), std::string("missing field '") + name + "'");
    return *it;
}

template <typename T>
T as(const json& j, const char* what) {
    try {
        return j.get<T>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("field '") + what + "': " + e.what());
    }
}

}  // namespace

json schema_to_json(const Schema& schema) {
    json vars = json::array();
    for (const auto& v : schema.variables()) {
        json jv{{"name", v.name()}};
        if (v.is_indexed()) {
            jv["levels"] = v.size();
        } else {
            json cats = json::array();
            for (std::size_t i = 0; i < v.size(); ++i) cats.push_back(v.label(i));
            jv["categories"] = std::move(cats);
        }
        vars.push_back(std::move(jv));
    }
    return json{{"variables", std::move(vars)}};
}

Schema schema_from_json(const json& j) {
    const json& vars = field(j, "variables");
    require(vars.is_array(), "schema variables must be an array");
    std::vector<Variable> out;
    for (const auto& jv : vars) {
        auto name = as<std::string>(field(jv, "name"), "name");
        if (jv.contains("levels"))
            out.push_back(Variable::indexed(std::move(name), as<std::size_t>(jv.at("levels"), "levels")));
        else
            out.emplace_back(std::move(name), as<std::vector<std::string>>(field(jv, "categories"), "categories"));
    }
    return Schema(std::move(out));
}

json table_to_json(const ContingencyTable& table) {
    json j{{"schema", schema_to_json(table.schema())},
           {"counts", std::vector<std::int64_t>(table.counts().begin(), table.counts().end())}};
    const auto zeros = table.structural_zero_indices();
    if (!zeros.empty()) j["structural_zeros"] = zeros;
    return j;
}

ContingencyTable table_from_json(const json& j) {
    Schema schema = schema_from_json(field(j, "schema"));
    auto counts = as<std::vector<std::int64_t>>(field(j, "counts"), "counts");
    std::vector<std::uint8_t> mask;
    if (j.contains("structural_zeros")) {
        mask.assign(schema.cell_count(), 0);
        for (auto idx : as<std::vector<std::size_t>>(j.at("structural_zeros"), "structural_zeros")) {
            require(idx < mask.size(), "structural zero index " + std::to_string(idx) + " out of range");
            mask[idx] = 1;
        }
    }
    return ContingencyTable(std::move(schema), std::move(counts), std::move(mask));
}

json real_table_to_json(const RealTable& table) {
    return json{{"schema", schema_to_json(table.schema())},
                {"values", std::vector<double>(table.values().begin(), table.values().end())}};
}

RealTable real_table_from_json(const json& j) {
    return RealTable(schema_from_json(field(j, "schema")), as<std::vector<double>>(field(j, "values"), "values"));
}

json spectrum_to_json(const TauSpectrum& spectrum) {
    json props = json::object();
    std::int64_t top = spectrum.proportions.empty() ? 0 : spectrum.proportions.rbegin()->first;
    for (const auto& [k, p] : spectrum.proportions) {
        std::string key = std::to_string(k);
        if (spectrum.open_tail && k == top) key += "+";
        props[key] = p;
    }
    json j{{"proportions", std::move(props)}};
    if (spectrum.total_cells > 0) j["total_cells"] = spectrum.total_cells;
    return j;
}

TauSpectrum spectrum_from_json(const json& j) {
    const json& props = field(j, "proportions");
    require(props.is_object(), "spectrum proportions must be an object keyed by cell size");
    TauSpectrum s;
    std::optional<std::int64_t> tail;
    for (const auto& [key, value] : props.items()) {
        std::string digits = key;
        const bool open = !digits.empty() && digits.back() == '+';
        if (open) digits.pop_back();
        std::int64_t k = 0;
        try {
            std::size_t used = 0;
            k = std::stoll(digits, &used);
            require(used == digits.size(), "");
        } catch (const std::exception&) {
            throw ValidationError("spectrum key '" + key + "' is not a cell size");
        }
        if (open) {
            require(!tail.has_value(), "spectrum has more than one open-tail key");
            tail = k;
        }
        s.proportions[k] = as<double>(value, "proportions");
    }
    if (tail) {
        require(*tail == s.proportions.rbegin()->first, "the open-tail key must be the largest cell size");
        s.open_tail = true;
    }
    if (j.contains("total_cells")) s.total_cells = as<std::size_t>(j.at("total_cells"), "total_cells");
    s.validate();
    return s;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(in.good(), "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

std::vector<std::vector<std::string>> read_csv(std::istream& in) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string cell;
    bool quoted = false;
    bool any = false;  // current row has content
    char ch = 0;
    auto end_row = [&] {
        if (any || !cell.empty() || !row.empty()) {
            row.push_back(std::move(cell));
            rows.push_back(std::move(row));
        }
        row.clear();
        cell.clear();
        any = false;
    };
    while (in.get(ch)) {
        if (quoted) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    cell.push_back('"');
                    in.get();
                } else {
                    quoted = false;
                }
            } else {
                cell.push_back(ch);
            }
            continue;
        }
        switch (ch) {
            case '"': quoted = true; any = true; break;
            case ',': row.push_back(std::move(cell)); cell.clear(); any = true; break;
            case '\r': break;
            case '\n': end_row(); break;
            default: cell.push_back(ch); any = true; break;
        }
    }
    require(!quoted, "CSV ends inside a quoted field");
    end_row();
    return rows;
}

Microdata read_microdata(std::istream& in) {
    auto rows = read_csv(in);
    require(!rows.empty(), "microdata CSV has no header row");
    Microdata data;
    data.header = std::move(rows.front());
    for (std::size_t r = 1; r < rows.size(); ++r) {
        require(rows[r].size() == data.header.size(),
                "record " + std::to_string(r - 1) + " has " + std::to_string(rows[r].size()) + " fields, header has " +
                    std::to_string(data.header.size()));
        data.records.push_back(std::move(rows[r]));
    }
    return data;
}

Schema infer_schema(const Microdata& data) {
    std::vector<Variable> vars;
    for (std::size_t c = 0; c < data.header.size(); ++c) {
        std::set<std::string> labels;
        for (const auto& rec : data.records) labels.insert(rec[c]);
        require(labels.size() >= 2, "column '" + data.header[c] +
                                        "' has fewer than 2 observed categories; supply a schema");
        vars.emplace_back(data.header[c], std::vector<std::string>(labels.begin(), labels.end()));
    }
    return Schema(std::move(vars));
}

ContingencyTable aggregate_csv(const Microdata& data, const Schema& schema) {
    // column of the CSV feeding each schema variable
    std::vector<std::size_t> source;
    for (const auto& v : schema.variables()) {
        auto it = std::find(data.header.begin(), data.header.end(), v.name());
        require(it != data.header.end(), "CSV has no column for variable '" + v.name() + "'");
        source.push_back(static_cast<std::size_t>(it - data.header.begin()));
    }
    std::vector<std::vector<std::string>> ordered;
    ordered.reserve(data.records.size());
    for (const auto& rec : data.records) {
        std::vector<std::string> out;
        out.reserve(source.size());
        for (auto c : source) out.push_back(rec[c]);
        ordered.push_back(std::move(out));
    }
    return aggregate_microdata(ordered, schema);
}

}  // namespace ctsynth
