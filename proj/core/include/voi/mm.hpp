#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "voi/evppi.hpp"
#include "voi/model.hpp"
#include "voi/types.hpp"

namespace voi {

inline constexpr std::size_t kRecommendedMinQ = 30;
inline constexpr const char* kLowQWarning = "Q<30";

struct MmConfig {
  std::size_t Q = 50;
  std::size_t R = 5000;
  bool clamp_variance = true;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  /// SIR prior pool size as a multiple of R (non-conjugate generators only).
  std::size_t sir_pool_factor = 10;
};

/// Per-column quantile selection. Each focal column is sorted; row q
/// (1-based) takes the element at 1-based position q*S/(Q+1), averaging the
/// two neighbours when that position is fractional. Positions below 1 are
/// clamped to the first element.
Matrix select_quantile_rows(const PsaResult& psa, const FocalSubset& focal, std::size_t Q);

/// 1-based fractional positions used by select_quantile_rows.
std::vector<double> quantile_positions(std::size_t S, std::size_t Q);

struct NestedVariance {
  double sigma2 = 0.0;
  std::optional<double> ess;
  bool low_ess = false;
};

/// One simulated dataset at phi_q, its focal posterior, R posterior INB
/// draws and their unbiased variance. Streams: (seed, Dataset/q) for the
/// data, (seed, Posterior/q) for the posterior and psi draws.
NestedVariance nested_posterior_variance(const EconomicModel& model, const FocalSubset& focal,
                                         const DataGenerator& gen, std::span<const double> phi_q, std::size_t R,
                                         std::uint64_t seed, std::size_t q, std::size_t sir_pool_factor = 10);

double average_posterior_variance(std::span<const double> sigma2_q);

/// INB* = ((INB_phi - mu) / sqrt(sigma2_phi)) * sqrt(sigma2_theta - sigma2_x) + mu.
/// When sigma2_x > sigma2_theta the radicand is taken as 0 if `clamp`, else
/// VarianceInflation is thrown. `clamped` (optional) reports which happened.
std::vector<double> rescale_inb(std::span<const double> conditional_inb, double sigma2_phi, double mu_theta,
                                double sigma2_theta, double sigma2_x, bool clamp, bool* clamped = nullptr);
std::vector<double> rescale_inb(const ConditionalInb& cinb, double mu_theta, double sigma2_theta, double sigma2_x,
                                bool clamp, bool* clamped = nullptr);

/// mean(max(0, INB*)) - max(0, mu_theta).
double evsi_from_rescaled(std::span<const double> rescaled, double mu_theta);

EvsiEstimate evsi_moment_matching(const EconomicModel& model, const PsaResult& psa, const ConditionalInb& cinb,
                                  const DataGenerator& gen, const MmConfig& config);

/// Ensure the generator's phi names are exactly the focal names, in order.
void check_generator_focal(const EconomicModel& model, const FocalSubset& focal, const DataGenerator& gen);

}  // namespace voi
