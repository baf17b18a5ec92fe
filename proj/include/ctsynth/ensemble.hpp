#pragma once

#include <cstdint>
#include <vector>

#include "ctsynth/table.hpp"

namespace ctsynth {

/// Synthesizer settings.
struct SynthesisParams {
    double sigma = 0.0;        ///< NBI dispersion; 0 is the Poisson limit
    double alpha = 0.0;        ///< mean given to sampling-zero cells; 0 keeps them zero
    std::int64_t m = 1;        ///< number of replicates
    double size_factor = 1.0;  ///< E(n_syn) / n; scales every cell mean
    std::uint64_t master_seed = 0;

    void validate() const;
};

/// Pseudocount magnitude to use when zero cells should be able to become
/// nonzero.
inline constexpr double kDefaultAlpha = 0.01;

/// m synthetic count vectors over one schema.
class SyntheticEnsemble {
  public:
    SyntheticEnsemble(Schema schema, std::vector<std::vector<std::int64_t>> replicates,
                      SynthesisParams params, std::int64_t source_total,
                      std::vector<std::uint8_t> structural_zeros = {});

    const Schema& schema() const noexcept { return schema_; }
    std::size_t m() const noexcept { return replicates_.size(); }
    std::span<const std::int64_t> replicate(std::size_t l) const { return replicates_.at(l); }
    const std::vector<std::vector<std::int64_t>>& replicates() const noexcept { return replicates_; }
    const std::vector<std::int64_t>& n_syn() const noexcept { return n_syn_; }
    double mean_n_syn() const noexcept;
    const SynthesisParams& params() const noexcept { return params_; }
    /// n of the table the ensemble was synthesized from.
    std::int64_t source_total() const noexcept { return source_total_; }
    std::span<const std::uint8_t> structural_zero_mask() const noexcept { return structural_; }

    ContingencyTable replicate_table(std::size_t l) const;
    /// First `m` replicates, with params.m updated.
    SyntheticEnsemble prefix(std::size_t m) const;

  private:
    Schema schema_;
    std::vector<std::vector<std::int64_t>> replicates_;
    std::vector<std::int64_t> n_syn_;
    SynthesisParams params_;
    std::int64_t source_total_ = 0;
    std::vector<std::uint8_t> structural_;
};

/// Cell-wise mean of the replicates.
RealTable average_ensemble(const SyntheticEnsemble& ensemble);
/// Cell-wise sum of the replicates; total equals the sum of n_syn.
ContingencyTable pool_ensemble(const SyntheticEnsemble& ensemble);

}  // namespace ctsynth
