#pragma once

#include <cstddef>
#include <cstdint>

#include "voi/model.hpp"
#include "voi/models/toy.hpp"
#include "voi/types.hpp"

namespace voi {

struct NestedConfig {
  std::size_t S = 2000;
  std::size_t R = 2000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::size_t sir_pool_factor = 10;
};

/// Gold-standard nested Monte Carlo EVSI. For each of S prior draws a
/// dataset is simulated from its focal part, the posterior INB mean is
/// estimated from R draws, and the estimate is
///   mean_s max(0, posterior mean_s) - max(0, mean_s INB(theta_s)),
/// the second term using the same S outer draws. Outer draw s uses streams
/// (seed, NestedOuter/s), (seed, Dataset/s) and (seed, Posterior/s).
EvsiEstimate evsi_nested_mc(const EconomicModel& model, const DataGenerator& gen, const FocalSubset& focal,
                            const NestedConfig& config);

/// Exact toy EVSI for a Binomial(n, pi1) trial by Beta-Binomial enumeration.
double toy_evsi_analytic(std::int64_t n, const models::ToyHyperparameters& h = {});

}  // namespace voi
