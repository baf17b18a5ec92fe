#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ctsynth {

/// One categorical variable. Labels are either listed explicitly or implied
/// by a level count ("0", "1", ..., "n-1"); the implicit form keeps schemas
/// for multi-million-cell fixtures small.
class Variable {
  public:
    Variable(std::string name, std::vector<std::string> categories);
    static Variable indexed(std::string name, std::size_t levels);

    const std::string& name() const noexcept { return name_; }
    std::size_t size() const noexcept { return levels_; }
    bool is_indexed() const noexcept { return labels_.empty(); }
    std::string label(std::size_t index) const;
    std::optional<std::size_t> find(std::string_view label) const;

    friend bool operator==(const Variable& a, const Variable& b) {
        return a.name_ == b.name_ && a.levels_ == b.levels_ && a.labels_ == b.labels_;
    }

  private:
    Variable() = default;

    std::string name_;
    std::size_t levels_ = 0;
    std::vector<std::string> labels_;
    std::unordered_map<std::string, std::size_t> lookup_;
};

/// Ordered list of variables. Cells are linearized row-major over the
/// declared order: the last variable varies fastest.
class Schema {
  public:
    explicit Schema(std::vector<Variable> variables);
    /// Single indexed variable named "cell" with K levels.
    static Schema flat(std::size_t cells);
    /// Variables v1..vp with indexed levels given by `dims`.
    static Schema grid(std::span<const std::size_t> dims);

    const std::vector<Variable>& variables() const noexcept { return variables_; }
    std::size_t cell_count() const noexcept { return cells_; }
    std::size_t stride(std::size_t variable) const { return strides_.at(variable); }

    /// Throws ValidationError when no variable has this name.
    std::size_t variable_index(std::string_view name) const;
    std::size_t cell_index(std::span<const std::size_t> category_indices) const;
    std::size_t category_of(std::size_t cell, std::size_t variable) const {
        return (cell / strides_[variable]) % variables_[variable].size();
    }

    friend bool operator==(const Schema& a, const Schema& b) { return a.variables_ == b.variables_; }

  private:
    std::vector<Variable> variables_;
    std::vector<std::size_t> strides_;
    std::size_t cells_ = 1;
};

/// Integer cell counts over a schema, with an optional structural-zero mask.
class ContingencyTable {
  public:
    ContingencyTable(Schema schema, std::vector<std::int64_t> counts,
                     std::vector<std::uint8_t> structural_zeros = {});
    static ContingencyTable zeros(Schema schema);

    const Schema& schema() const noexcept { return schema_; }
    std::span<const std::int64_t> counts() const noexcept { return counts_; }
    std::int64_t count(std::size_t cell) const { return counts_[cell]; }
    std::size_t size() const noexcept { return counts_.size(); }
    std::int64_t total() const noexcept { return total_; }
    std::int64_t max_count() const noexcept;

    bool is_structural_zero(std::size_t cell) const { return structural_[cell] != 0; }
    std::span<const std::uint8_t> structural_zero_mask() const noexcept { return structural_; }
    std::vector<std::size_t> structural_zero_indices() const;

  private:
    Schema schema_;
    std::vector<std::int64_t> counts_;
    std::vector<std::uint8_t> structural_;
    std::int64_t total_ = 0;
};

/// Nonnegative real-valued cells, e.g. the mean of m synthetic replicates.
class RealTable {
  public:
    RealTable(Schema schema, std::vector<double> values);
    static RealTable from_counts(const ContingencyTable& table);

    const Schema& schema() const noexcept { return schema_; }
    std::span<const double> values() const noexcept { return values_; }
    double value(std::size_t cell) const { return values_[cell]; }
    std::size_t size() const noexcept { return values_.size(); }
    double total() const noexcept;

  private:
    Schema schema_;
    std::vector<double> values_;
};

/// Proportion of cells at each cell size k. When `open_tail` is set the
/// largest key holds the aggregated mass of every size >= that key (the
/// "6+" column of a published spectrum).
struct TauSpectrum {
    std::map<std::int64_t, double> proportions;
    std::size_t total_cells = 0;
    bool open_tail = false;

    double at(std::int64_t k) const;
    std::int64_t max_size() const;
    /// Throws ValidationError if proportions leave [0,1] or do not sum to 1.
    void validate() const;
};

/// Cell-size spectrum of a school-census-like administrative table:
/// sizes 0..5 plus an open "6+" bucket.
TauSpectrum census_spectrum();

/// Spreads an open tail uniformly over [tail, max_count]; closed spectra are
/// returned unchanged.
TauSpectrum materialize_tail(const TauSpectrum& spectrum, std::int64_t max_count);

/// Tallies records (one label per variable, in schema order) into cells.
ContingencyTable aggregate_microdata(std::span<const std::vector<std::string>> records,
                                     const Schema& schema);

enum class Binning { exact, unit_rounded };

TauSpectrum tau_spectrum(const ContingencyTable& table);
/// `exact` requires every value to be integral; `unit_rounded` bins to the
/// nearest integer.
TauSpectrum tau_spectrum(const RealTable& table, Binning binning);

/// Draws each cell size independently from `spectrum`. An open tail is
/// spread uniformly over [tail, max_count]. Deterministic in `seed`.
ContingencyTable fixture_from_spectrum(const TauSpectrum& spectrum, std::size_t cells,
                                       std::int64_t max_count, std::uint64_t seed);
ContingencyTable fixture_from_spectrum(const TauSpectrum& spectrum, Schema schema,
                                       std::int64_t max_count, std::uint64_t seed);

inline constexpr std::int64_t kDefaultTailMax = 50;

}  // namespace ctsynth
