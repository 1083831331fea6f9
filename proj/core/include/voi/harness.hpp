#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "voi/evppi.hpp"
#include "voi/model.hpp"
#include "voi/types.hpp"

namespace voi {

struct OracleSpec {
  enum class Kind { Analytic, NestedMc, Fixed };
  Kind kind = Kind::Analytic;
  // NestedMc
  std::size_t S = 0;
  std::size_t R = 0;
  std::uint64_t seed = 1;
  std::optional<std::filesystem::path> cache;
  // Fixed
  double value = 0.0;
};

struct SweepConfig {
  std::vector<std::size_t> Q_values;
  /// Total posterior simulations per estimate; R = budget / Q.
  std::vector<std::size_t> budgets;
  std::size_t repetitions = 200;
  OracleSpec oracle;
  std::uint64_t base_seed = 1;
  bool clamp_variance = true;
  unsigned threads = 0;
  std::size_t sir_pool_factor = 10;
};

struct SweepCell {
  std::size_t Q = 0;
  std::size_t budget = 0;
  std::size_t R = 0;
  std::size_t remainder = 0;
  std::vector<double> estimates;
  double variance = 0.0;
  double bias = 0.0;
  double mean_runtime_s = 0.0;
};

struct SweepResult {
  /// Ordered by budget, then Q, both ascending.
  std::vector<SweepCell> cells;
  double oracle = 0.0;
  std::vector<std::string> warnings;
};

struct CachedOracle {
  double value = 0.0;
  std::size_t S = 0;
  std::size_t R = 0;
  std::uint64_t seed = 0;
  std::string model_hash;
};

/// FNV-1a over the model fingerprint and the study design.
std::string model_hash(const EconomicModel& model, const DataGenerator& gen);

std::optional<CachedOracle> load_oracle_cache(const std::filesystem::path& path);
void save_oracle_cache(const CachedOracle& cached, const std::filesystem::path& path);

/// Analytic: exact toy enumeration (toy model + toy generator only).
/// NestedMc: long nested run, reused from `cache` when S, R, seed and the
/// model hash all match, written there otherwise. Fixed: the given value.
double resolve_oracle(const EconomicModel& model, const DataGenerator& gen, const FocalSubset& focal,
                      const OracleSpec& spec, unsigned threads = 0);

/// Repetition r of cell c runs the moment-matching estimator with seed
/// derive_seed(base_seed, Repetition/(c * repetitions + r)).
SweepResult run_sweep(const EconomicModel& model, const DataGenerator& gen, const PsaResult& psa,
                      const ConditionalInb& cinb, const SweepConfig& config);

/// Columns Q,budget,R,variance,bias,mean_runtime_s,repetitions.
std::string summarize_sweep(const SweepResult& result);

struct SummaryRow {
  std::size_t Q = 0, budget = 0, R = 0;
  double variance = 0.0, bias = 0.0, mean_runtime_s = 0.0;
  std::size_t repetitions = 0;
};
std::vector<SummaryRow> parse_sweep_summary(const std::string& csv);

/// Spearman rank correlation with average ranks for ties.
double spearman_correlation(std::span<const double> x, std::span<const double> y);

}  // namespace voi
