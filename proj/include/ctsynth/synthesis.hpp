#pragma once

#include <cstdint>
#include <vector>

#include "ctsynth/ensemble.hpp"
#include "ctsynth/seeding.hpp"
#include "ctsynth/table.hpp"

namespace ctsynth {

/// Negative binomial (type I) probability of y given mean mu and dispersion
/// sigma, so that Var = mu + sigma * mu^2. sigma == 0 gives Poisson(mu).
double nbi_pmf(std::int64_t y, double mu, double sigma);
double nbi_log_pmf(std::int64_t y, double mu, double sigma);

/// One NBI(mu, sigma) draw as a gamma-Poisson mixture:
/// G ~ Gamma(shape 1/sigma, scale sigma*mu), Y ~ Poisson(G).
std::int64_t nbi_sample(double mu, double sigma, Engine& rng);

/// Cells per independently seeded block. Replicate generation is split on
/// these boundaries, so output does not depend on the worker count.
inline constexpr std::size_t kCellsPerStream = std::size_t{1} << 15;

/// Seed of replicate `l` (0-based) under `master_seed`.
std::uint64_t replicate_seed(std::uint64_t master_seed, std::size_t l) noexcept;

/// One synthetic replicate: positive cells draw NBI(rho*f, sigma), sampling
/// zeros draw NBI(rho*alpha, sigma) when alpha > 0 and stay 0 otherwise,
/// structural zeros stay 0. `params.m` is ignored.
std::vector<std::int64_t> synthesize_once(const ContingencyTable& table, const SynthesisParams& params,
                                          std::uint64_t stream_seed, unsigned workers = 1);

/// params.m independent replicates; replicate l uses replicate_seed(master, l).
/// Bit-identical for every `workers` value (0 = hardware concurrency).
SyntheticEnsemble synthesize(const ContingencyTable& table, const SynthesisParams& params,
                             unsigned workers = 1);

}  // namespace ctsynth
