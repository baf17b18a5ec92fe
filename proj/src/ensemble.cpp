#include "ctsynth/ensemble.hpp"

#include <cmath>
#include <numeric>

#include "ctsynth/error.hpp"

namespace ctsynth {

void SynthesisParams::validate() const {
    require(std::isfinite(sigma) && sigma >= 0.0, "sigma must be finite and >= 0");
    require(std::isfinite(alpha) && alpha >= 0.0, "alpha must be finite and >= 0");
    require(m >= 1, "m must be >= 1");
    require(std::isfinite(size_factor) && size_factor > 0.0, "size factor must be finite and > 0");
}

SyntheticEnsemble::SyntheticEnsemble(Schema schema, std::vector<std::vector<std::int64_t>> replicates,
                                     SynthesisParams params, std::int64_t source_total,
                                     std::vector<std::uint8_t> structural_zeros)
    : schema_(std::move(schema)),
      replicates_(std::move(replicates)),
      params_(params),
      source_total_(source_total),
      structural_(std::move(structural_zeros)) {
    require(!replicates_.empty(), "ensemble needs at least one replicate");
    const std::size_t cells = schema_.cell_count();
    if (structural_.empty()) structural_.assign(cells, 0);
    require(structural_.size() == cells, "structural-zero mask length differs from cell count");
    require(source_total_ >= 0, "source total must be >= 0");
    params_.m = static_cast<std::int64_t>(replicates_.size());
    n_syn_.reserve(replicates_.size());
    for (std::size_t l = 0; l < replicates_.size(); ++l) {
        const auto& rep = replicates_[l];
        require(rep.size() == cells, "replicate " + std::to_string(l + 1) + " length differs from schema");
        std::int64_t total = 0;
        for (std::size_t i = 0; i < cells; ++i) {
            require(rep[i] >= 0, "negative synthetic count");
            require(!(structural_[i] && rep[i] != 0), "structural-zero cell synthesized to nonzero");
            total += rep[i];
        }
        n_syn_.push_back(total);
    }
}

double SyntheticEnsemble::mean_n_syn() const noexcept {
    const double sum = std::accumulate(n_syn_.begin(), n_syn_.end(), 0.0);
    return sum / static_cast<double>(n_syn_.size());
}

ContingencyTable SyntheticEnsemble::replicate_table(std::size_t l) const {
    return ContingencyTable(schema_, replicates_.at(l), structural_);
}

SyntheticEnsemble SyntheticEnsemble::prefix(std::size_t m) const {
    require(m >= 1 && m <= replicates_.size(), "prefix length outside [1, m]");
    std::vector<std::vector<std::int64_t>> reps(replicates_.begin(),
                                                 replicates_.begin() + static_cast<std::ptrdiff_t>(m));
    return SyntheticEnsemble(schema_, std::move(reps), params_, source_total_, structural_);
}

RealTable average_ensemble(const SyntheticEnsemble& ensemble) {
    const ContingencyTable pooled = pool_ensemble(ensemble);
    const double m = static_cast<double>(ensemble.m());
    std::vector<double> values(pooled.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        values[i] = static_cast<double>(pooled.count(i)) / m;
    return RealTable(ensemble.schema(), std::move(values));
}

ContingencyTable pool_ensemble(const SyntheticEnsemble& ensemble) {
    std::vector<std::int64_t> sum(ensemble.schema().cell_count(), 0);
    for (const auto& rep : ensemble.replicates())
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += rep[i];
    return ContingencyTable(ensemble.schema(),
                            std::move(sum),
                            std::vector<std::uint8_t>(ensemble.structural_zero_mask().begin(),
                                                      ensemble.structural_zero_mask().end()));
}

}  // namespace ctsynth
