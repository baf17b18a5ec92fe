#include "ctsynth/synthesis.hpp"

#include <cmath>
#include <random>

#include "ctsynth/error.hpp"
#include "ctsynth/parallel.hpp"

namespace ctsynth {

namespace {

void check_nbi_args(double mu, double sigma) {
    require(std::isfinite(mu) && mu > 0.0, "NBI mean must be finite and > 0");
    require(std::isfinite(sigma) && sigma >= 0.0, "NBI sigma must be finite and >= 0");
}

// Below this y the gamma ratio is summed term by term, which stays accurate
// when 1/sigma is huge and lgamma differences would cancel.
constexpr std::int64_t kProductTerms = 4096;

}  // namespace

double nbi_log_pmf(std::int64_t y, double mu, double sigma) {
    check_nbi_args(mu, sigma);
    if (y < 0) return -std::numeric_limits<double>::infinity();
    const double yd = static_cast<double>(y);
    if (sigma == 0.0) return yd * std::log(mu) - mu - std::lgamma(yd + 1.0);

    const double sm = sigma * mu;
    const double tail = -std::log1p(sm) / sigma;
    if (y < kProductTerms) {
        // log[Gamma(y+1/s)/Gamma(1/s)] + y log(s mu/(1+s mu))
        //   = sum_j log((1 + j s) mu / (1 + s mu))
        double acc = 0.0;
        const double log_scale = std::log(mu) - std::log1p(sm);
        for (std::int64_t j = 0; j < y; ++j) acc += std::log1p(static_cast<double>(j) * sigma) + log_scale;
        return acc - std::lgamma(yd + 1.0) + tail;
    }
    const double r = 1.0 / sigma;
    return std::lgamma(yd + r) - std::lgamma(yd + 1.0) - std::lgamma(r) + yd * (std::log(sm) - std::log1p(sm)) +
           tail;
}

double nbi_pmf(std::int64_t y, double mu, double sigma) {
    return std::exp(nbi_log_pmf(y, mu, sigma));
}

std::int64_t nbi_sample(double mu, double sigma, Engine& rng) {
    check_nbi_args(mu, sigma);
    using Poisson = std::poisson_distribution<std::int64_t>;
    using Gamma = std::gamma_distribution<double>;
    double rate = mu;
    if (sigma > 0.0) rate = Gamma(1.0 / sigma, sigma * mu)(rng);
    if (!(rate > 0.0)) return 0;
    return Poisson(rate)(rng);
}

std::uint64_t replicate_seed(std::uint64_t master_seed, std::size_t l) noexcept {
    return derive_seed(master_seed, static_cast<std::uint64_t>(l));
}

namespace {

void synthesize_block(const ContingencyTable& table, const SynthesisParams& p, std::uint64_t stream_seed,
                      std::size_t block, std::int64_t* out) {
    const std::size_t begin = block * kCellsPerStream;
    const std::size_t end = std::min(table.size(), begin + kCellsPerStream);
    Engine rng(derive_seed(stream_seed, block));
    const auto counts = table.counts();
    const double zero_mean = p.size_factor * p.alpha;
    for (std::size_t i = begin; i < end; ++i) {
        const std::int64_t f = counts[i];
        std::int64_t y = 0;
        if (f > 0)
            y = nbi_sample(p.size_factor * static_cast<double>(f), p.sigma, rng);
        else if (zero_mean > 0.0 && !table.is_structural_zero(i))
            y = nbi_sample(zero_mean, p.sigma, rng);
        out[i] = y;
    }
}

std::size_t block_count(const ContingencyTable& table) {
    return (table.size() + kCellsPerStream - 1) / kCellsPerStream;
}

}  // namespace

std::vector<std::int64_t> synthesize_once(const ContingencyTable& table, const SynthesisParams& params,
                                          std::uint64_t stream_seed, unsigned workers) {
    SynthesisParams p = params;
    p.m = 1;
    p.validate();
    std::vector<std::int64_t> out(table.size(), 0);
    parallel_for(block_count(table), workers,
                 [&](std::size_t b) { synthesize_block(table, p, stream_seed, b, out.data()); });
    return out;
}

SyntheticEnsemble synthesize(const ContingencyTable& table, const SynthesisParams& params, unsigned workers) {
    params.validate();
    const auto m = static_cast<std::size_t>(params.m);
    const std::size_t blocks = block_count(table);
    std::vector<std::vector<std::int64_t>> reps(m, std::vector<std::int64_t>(table.size(), 0));
    parallel_for(m * blocks, workers, [&](std::size_t job) {
        const std::size_t l = job / blocks;
        synthesize_block(table, params, replicate_seed(params.master_seed, l), job % blocks, reps[l].data());
    });
    std::vector<std::uint8_t> mask(table.structural_zero_mask().begin(), table.structural_zero_mask().end());
    return SyntheticEnsemble(table.schema(), std::move(reps), params, table.total(), std::move(mask));
}

}  // namespace ctsynth
