#include "ctsynth/ensemble_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ctsynth/error.hpp"

namespace ctsynth {

namespace fs = std::filesystem;

json params_to_json(const SynthesisParams& p) {
    return json{{"sigma", p.sigma},
                {"alpha", p.alpha},
                {"m", p.m},
                {"size_factor", p.size_factor},
                {"master_seed", p.master_seed}};
}

SynthesisParams params_from_json(const json& j) {
    SynthesisParams p;
    try {
        p.sigma = j.at("sigma").get<double>();
        p.alpha = j.value("alpha", 0.0);
        p.m = j.at("m").get<std::int64_t>();
        p.size_factor = j.value("size_factor", 1.0);
        p.master_seed = j.value("master_seed", std::uint64_t{0});
    } catch (const json::exception& e) {
        throw ValidationError(std::string("synthesis params: ") + e.what());
    }
    p.validate();
    return p;
}

namespace {

std::string replicate_name(std::size_t l) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "rep_%04zu.json", l + 1);
    return buf;
}

}  // namespace

fs::path write_ensemble(const SyntheticEnsemble& ensemble, const fs::path& dir, EnsembleStorage storage) {
    fs::create_directories(dir);
    json manifest{{"format", "ctsynth-ensemble"},
                  {"version", 1},
                  {"params", params_to_json(ensemble.params())},
                  {"source_total", ensemble.source_total()},
                  {"schema", schema_to_json(ensemble.schema())},
                  {"n_syn", ensemble.n_syn()}};
    std::vector<std::size_t> zeros;
    const auto mask = ensemble.structural_zero_mask();
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) zeros.push_back(i);
    if (!zeros.empty()) manifest["structural_zeros"] = zeros;

    if (storage == EnsembleStorage::json) {
        json files = json::array();
        for (std::size_t l = 0; l < ensemble.m(); ++l) {
            const auto name = replicate_name(l);
            write_json_file(dir / name, table_to_json(ensemble.replicate_table(l)));
            files.push_back(name);
        }
        manifest["storage"] = "json";
        manifest["replicates"] = std::move(files);
    } else {
        std::ofstream out(dir / "replicates.csv", std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + (dir / "replicates.csv").string());
        out << "cell_index";
        for (std::size_t l = 0; l < ensemble.m(); ++l) out << ",rep_" << l + 1;
        out << '\n';
        for (std::size_t i = 0; i < ensemble.schema().cell_count(); ++i) {
            out << i;
            for (std::size_t l = 0; l < ensemble.m(); ++l) out << ',' << ensemble.replicate(l)[i];
            out << '\n';
        }
        manifest["storage"] = "csv";
        manifest["replicates"] = "replicates.csv";
    }
    const fs::path path = dir / "manifest.json";
    write_json_file(path, manifest);
    return path;
}

namespace {

std::vector<std::vector<std::int64_t>> read_columnar_csv(const fs::path& path, std::size_t cells, std::size_t m) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "cannot open " + path.string());
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), path.string() + " is empty");
    std::vector<std::vector<std::int64_t>> reps(m, std::vector<std::int64_t>(cells, 0));
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        require(row < cells, path.string() + " has more rows than cells");
        const char* p = line.data();
        const char* end = p + line.size();
        std::size_t index = 0;
        auto r = std::from_chars(p, end, index);
        require(r.ec == std::errc{} && index == row, path.string() + ": bad cell_index on row " + std::to_string(row));
        p = r.ptr;
        for (std::size_t l = 0; l < m; ++l) {
            require(p < end && *p == ',', path.string() + ": too few columns on row " + std::to_string(row));
            r = std::from_chars(p + 1, end, reps[l][row]);
            require(r.ec == std::errc{}, path.string() + ": bad count on row " + std::to_string(row));
            p = r.ptr;
        }
        require(p == end, path.string() + ": too many columns on row " + std::to_string(row));
        ++row;
    }
    require(row == cells, path.string() + " has " + std::to_string(row) + " rows, expected " + std::to_string(cells));
    return reps;
}

}  // namespace

namespace {

SyntheticEnsemble load_ensemble(const fs::path& manifest_path, const json& manifest) {
    require(manifest.value("format", "") == "ctsynth-ensemble", manifest_path.string() + " is not an ensemble manifest");
    const SynthesisParams params = params_from_json(manifest.at("params"));
    Schema schema = schema_from_json(manifest.at("schema"));
    const fs::path base = manifest_path.parent_path();
    const auto m = static_cast<std::size_t>(params.m);

    std::vector<std::uint8_t> mask;
    if (manifest.contains("structural_zeros")) {
        mask.assign(schema.cell_count(), 0);
        for (auto idx : manifest.at("structural_zeros").get<std::vector<std::size_t>>()) {
            require(idx < mask.size(), "structural zero index out of range");
            mask[idx] = 1;
        }
    }

    std::vector<std::vector<std::int64_t>> reps;
    const std::string storage = manifest.value("storage", "json");
    if (storage == "csv") {
        reps = read_columnar_csv(base / manifest.at("replicates").get<std::string>(), schema.cell_count(), m);
    } else {
        const auto files = manifest.at("replicates").get<std::vector<std::string>>();
        require(files.size() == m, "manifest lists " + std::to_string(files.size()) + " replicates but m = " +
                                       std::to_string(m));
        for (const auto& f : files) {
            const ContingencyTable t = table_from_json(read_json_file(base / f));
            require(t.schema() == schema, f + " does not match the manifest schema");
            reps.emplace_back(t.counts().begin(), t.counts().end());
        }
    }
    SyntheticEnsemble ensemble(std::move(schema), std::move(reps), params,
                               manifest.at("source_total").get<std::int64_t>(), std::move(mask));
    if (manifest.contains("n_syn"))
        require(manifest.at("n_syn").get<std::vector<std::int64_t>>() == ensemble.n_syn(),
                "manifest n_syn disagrees with replicate totals");
    return ensemble;
}

}  // namespace

SyntheticEnsemble read_ensemble(const fs::path& manifest_path) {
    const json manifest = read_json_file(manifest_path);
    try {
        return load_ensemble(manifest_path, manifest);
    } catch (const json::exception& e) {
        throw ValidationError(manifest_path.string() + ": " + e.what());
    }
}

}  // namespace ctsynth
