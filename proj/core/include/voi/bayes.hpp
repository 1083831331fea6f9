#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "voi/model.hpp"
#include "voi/types.hpp"

namespace voi {

struct BetaParams {
  double alpha;
  double beta;
  bool operator==(const BetaParams&) const = default;
};

/// Beta(alpha, beta) prior + x successes out of n -> Beta(alpha + x, beta + n - x).
BetaParams beta_binomial_update(double alpha, double beta, std::int64_t n, std::int64_t x);

/// Elementwise alpha + counts.
std::vector<double> dirichlet_multinomial_update(std::span<const double> alpha, std::span<const std::int64_t> counts);

struct SirResult {
  PosteriorDraws draws;
  /// Kish effective sample size of the importance weights over the prior pool.
  double ess = 0.0;
  /// Set when ess < 1% of R.
  bool low_ess = false;
};

/// Sampling-importance-resampling: weight each prior row by its likelihood
/// and draw R rows with replacement in proportion to the weights.
SirResult sir_posterior(const Matrix& prior_draws, const DataGenerator& gen, const FutureDataset& data,
                        std::size_t R, Rng& rng);

/// For each posterior focal draw, take fresh prior draws for psi, assemble
/// theta and evaluate the INB. Only valid for priors where psi is
/// independent of phi; the model's check_focal enforces this.
std::vector<double> posterior_inb_samples(const EconomicModel& model, const FocalSubset& focal,
                                          const PosteriorDraws& posterior_focal, Rng& rng);

/// Draw a prior pool restricted to the focal columns.
Matrix prior_focal_pool(const EconomicModel& model, const FocalSubset& focal, std::size_t rows, Rng& rng);

}  // namespace voi
