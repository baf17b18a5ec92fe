#include "ctsynth/table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "ctsynth/error.hpp"
#include "ctsynth/seeding.hpp"

namespace ctsynth {

// ---------------------------------------------------------------- Variable

Variable::Variable(std::string name, std::vector<std::string> categories)
    : name_(std::move(name)), levels_(categories.size()), labels_(std::move(categories)) {
    require(!name_.empty(), "variable name must be nonempty");
    require(levels_ >= 2, "variable '" + name_ + "' needs at least 2 categories");
    lookup_.reserve(levels_);
    for (std::size_t i = 0; i < levels_; ++i) {
        auto [it, inserted] = lookup_.emplace(labels_[i], i);
        require(inserted, "duplicate category '" + labels_[i] + "' in variable '" + name_ + "'");
    }
}

Variable Variable::indexed(std::string name, std::size_t levels) {
    require(!name.empty(), "variable name must be nonempty");
    require(levels >= 2, "variable '" + name + "' needs at least 2 categories");
    Variable v;
    v.name_ = std::move(name);
    v.levels_ = levels;
    return v;
}

std::string Variable::label(std::size_t index) const {
    if (index >= levels_) throw std::out_of_range("category index out of range");
    return is_indexed() ? std::to_string(index) : labels_[index];
}

std::optional<std::size_t> Variable::find(std::string_view label) const {
    if (!is_indexed()) {
        auto it = lookup_.find(std::string(label));
        if (it == lookup_.end()) return std::nullopt;
        return it->second;
    }
    std::size_t value = 0;
    auto [end, ec] = std::from_chars(label.data(), label.data() + label.size(), value);
    if (ec != std::errc{} || end != label.data() + label.size() || value >= levels_) return std::nullopt;
    // reject non-canonical spellings such as "01"
    if (label.size() > 1 && label.front() == '0') return std::nullopt;
    return value;
}

// ------------------------------------------------------------------ Schema

Schema::Schema(std::vector<Variable> variables) : variables_(std::move(variables)) {
    require(!variables_.empty(), "schema needs at least one variable");
    strides_.assign(variables_.size(), 1);
    for (std::size_t i = variables_.size(); i-- > 0;) {
        strides_[i] = cells_;
        const std::size_t levels = variables_[i].size();
        require(cells_ <= std::numeric_limits<std::size_t>::max() / levels, "schema cell count overflows");
        cells_ *= levels;
    }
    for (std::size_t i = 0; i < variables_.size(); ++i)
        for (std::size_t j = i + 1; j < variables_.size(); ++j)
            require(variables_[i].name() != variables_[j].name(),
                    "duplicate variable name '" + variables_[i].name() + "'");
}

Schema Schema::flat(std::size_t cells) {
    return Schema({Variable::indexed("cell", cells)});
}

Schema Schema::grid(std::span<const std::size_t> dims) {
    std::vector<Variable> vars;
    vars.reserve(dims.size());
    for (std::size_t i = 0; i < dims.size(); ++i)
        vars.push_back(Variable::indexed("v" + std::to_string(i + 1), dims[i]));
    return Schema(std::move(vars));
}

std::size_t Schema::variable_index(std::string_view name) const {
    for (std::size_t i = 0; i < variables_.size(); ++i)
        if (variables_[i].name() == name) return i;
    throw ValidationError("unknown variable '" + std::string(name) + "'");
}

std::size_t Schema::cell_index(std::span<const std::size_t> category_indices) const {
    require(category_indices.size() == variables_.size(), "wrong number of category indices");
    std::size_t cell = 0;
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        require(category_indices[i] < variables_[i].size(), "category index out of range");
        cell += category_indices[i] * strides_[i];
    }
    return cell;
}

// -------------------------------------------------------- ContingencyTable

ContingencyTable::ContingencyTable(Schema schema, std::vector<std::int64_t> counts,
                                   std::vector<std::uint8_t> structural_zeros)
    : schema_(std::move(schema)), counts_(std::move(counts)), structural_(std::move(structural_zeros)) {
    require(counts_.size() == schema_.cell_count(),
            "table has " + std::to_string(counts_.size()) + " counts but schema has " +
                std::to_string(schema_.cell_count()) + " cells");
    if (structural_.empty()) structural_.assign(counts_.size(), 0);
    require(structural_.size() == counts_.size(), "structural-zero mask length differs from cell count");
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        require(counts_[i] >= 0, "negative count in cell " + std::to_string(i));
        require(!(structural_[i] && counts_[i] != 0),
                "structural-zero cell " + std::to_string(i) + " has a nonzero count");
        total_ += counts_[i];
    }
}

ContingencyTable ContingencyTable::zeros(Schema schema) {
    const std::size_t k = schema.cell_count();
    return ContingencyTable(std::move(schema), std::vector<std::int64_t>(k, 0));
}

std::int64_t ContingencyTable::max_count() const noexcept {
    return counts_.empty() ? 0 : *std::max_element(counts_.begin(), counts_.end());
}

std::vector<std::size_t> ContingencyTable::structural_zero_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < structural_.size(); ++i)
        if (structural_[i]) out.push_back(i);
    return out;
}

// --------------------------------------------------------------- RealTable

RealTable::RealTable(Schema schema, std::vector<double> values)
    : schema_(std::move(schema)), values_(std::move(values)) {
    require(values_.size() == schema_.cell_count(), "real table length differs from schema cell count");
    for (std::size_t i = 0; i < values_.size(); ++i)
        require(std::isfinite(values_[i]) && values_[i] >= 0.0,
                "real table value in cell " + std::to_string(i) + " must be finite and nonnegative");
}

RealTable RealTable::from_counts(const ContingencyTable& table) {
    std::vector<double> values(table.counts().begin(), table.counts().end());
    return RealTable(table.schema(), std::move(values));
}

double RealTable::total() const noexcept {
    return std::accumulate(values_.begin(), values_.end(), 0.0);
}

// ------------------------------------------------------------- TauSpectrum

double TauSpectrum::at(std::int64_t k) const {
    auto it = proportions.find(k);
    return it == proportions.end() ? 0.0 : it->second;
}

std::int64_t TauSpectrum::max_size() const {
    std::int64_t top = 0;
    for (const auto& [k, p] : proportions)
        if (p > 0.0) top = std::max(top, k);
    return top;
}

void TauSpectrum::validate() const {
    require(!proportions.empty(), "spectrum is empty");
    double sum = 0.0;
    for (const auto& [k, p] : proportions) {
        require(k >= 0, "spectrum cell sizes must be nonnegative");
        require(p >= 0.0 && p <= 1.0, "spectrum proportion for k=" + std::to_string(k) + " outside [0,1]");
        sum += p;
    }
    require(std::abs(sum - 1.0) <= 1e-9, "spectrum proportions sum to " + std::to_string(sum) + ", not 1");
}

TauSpectrum census_spectrum() {
    TauSpectrum s;
    s.proportions = {{0, 0.9038}, {1, 0.0346}, {2, 0.0148}, {3, 0.0075},
                     {4, 0.0056}, {5, 0.0038}, {6, 0.0300}};
    s.open_tail = true;
    // published values are rounded to 4 dp and sum to 1.0001
    double sum = 0.0;
    for (const auto& [k, p] : s.proportions) sum += p;
    for (auto& [k, p] : s.proportions) p /= sum;
    return s;
}

TauSpectrum materialize_tail(const TauSpectrum& spectrum, std::int64_t max_count) {
    if (!spectrum.open_tail || spectrum.proportions.empty()) return spectrum;
    TauSpectrum out = spectrum;
    out.open_tail = false;
    const auto tail = std::prev(out.proportions.end());
    const std::int64_t from = tail->first;
    const double mass = tail->second;
    require(max_count >= from, "tail maximum must be at least the tail start " + std::to_string(from));
    out.proportions.erase(tail);
    const double share = mass / static_cast<double>(max_count - from + 1);
    for (std::int64_t k = from; k <= max_count; ++k) out.proportions[k] += share;
    return out;
}

// -------------------------------------------------------------- operations

ContingencyTable aggregate_microdata(std::span<const std::vector<std::string>> records,
                                     const Schema& schema) {
    const auto& vars = schema.variables();
    std::vector<std::int64_t> counts(schema.cell_count(), 0);
    for (std::size_t r = 0; r < records.size(); ++r) {
        const auto& rec = records[r];
        require(rec.size() == vars.size(), "record " + std::to_string(r) + " has " +
                                               std::to_string(rec.size()) + " fields, expected " +
                                               std::to_string(vars.size()));
        std::size_t cell = 0;
        for (std::size_t v = 0; v < vars.size(); ++v) {
            auto idx = vars[v].find(rec[v]);
            require(idx.has_value(), "record " + std::to_string(r) + ": unknown category '" + rec[v] +
                                         "' for variable '" + vars[v].name() + "'");
            cell += *idx * schema.stride(v);
        }
        ++counts[cell];
    }
    return ContingencyTable(schema, std::move(counts));
}

namespace {

TauSpectrum spectrum_from_tally(const std::map<std::int64_t, std::size_t>& tally, std::size_t cells) {
    TauSpectrum s;
    s.total_cells = cells;
    for (const auto& [k, n] : tally)
        s.proportions[k] = static_cast<double>(n) / static_cast<double>(cells);
    return s;
}

}  // namespace

TauSpectrum tau_spectrum(const ContingencyTable& table) {
    require(table.size() >= 1, "spectrum of an empty table");
    std::map<std::int64_t, std::size_t> tally;
    for (auto c : table.counts()) ++tally[c];
    return spectrum_from_tally(tally, table.size());
}

TauSpectrum tau_spectrum(const RealTable& table, Binning binning) {
    require(table.size() >= 1, "spectrum of an empty table");
    std::map<std::int64_t, std::size_t> tally;
    for (double v : table.values()) {
        const double r = std::nearbyint(v);
        if (binning == Binning::exact)
            require(r == v, "exact binning of a non-integral value; use unit-rounded binning");
        ++tally[static_cast<std::int64_t>(r)];
    }
    return spectrum_from_tally(tally, table.size());
}

ContingencyTable fixture_from_spectrum(const TauSpectrum& spectrum, std::size_t cells,
                                       std::int64_t max_count, std::uint64_t seed) {
    require(cells >= 2, "fixture needs at least 2 cells");
    return fixture_from_spectrum(spectrum, Schema::flat(cells), max_count, seed);
}

ContingencyTable fixture_from_spectrum(const TauSpectrum& spectrum, Schema schema,
                                       std::int64_t max_count, std::uint64_t seed) {
    spectrum.validate();
    const TauSpectrum closed = materialize_tail(spectrum, max_count);

    // inverse-CDF table over the materialized support
    std::vector<std::int64_t> sizes;
    std::vector<double> cumulative;
    double acc = 0.0;
    for (const auto& [k, p] : closed.proportions) {
        if (p <= 0.0) continue;
        acc += p;
        sizes.push_back(k);
        cumulative.push_back(acc);
    }
    cumulative.back() = std::numeric_limits<double>::infinity();

    Engine rng(seed);
    std::vector<std::int64_t> counts(schema.cell_count());
    for (auto& c : counts) {
        const double u = uniform01(rng) * acc;
        const auto pos = std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin();
        c = sizes[static_cast<std::size_t>(pos)];
    }
    return ContingencyTable(std::move(schema), std::move(counts));
}

}  // namespace ctsynth
