#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "voi/harness.hpp"

namespace voi::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

struct DesignConfig {
  /// "binomial" (toy), "chemo_trial" (chemo) or "flat" (observes nothing).
  std::string type;
  std::int64_t n = 20;
  std::int64_t n_per_arm = 150;
};

struct RunConfig {
  /// psa, evppi, mm, nested, oracle or sweep.
  std::string method;
  /// toy, chemo or external (PSA read from psa_csv; evppi only).
  std::string model = "toy";
  std::optional<std::filesystem::path> chemo_hyperparameters;
  std::optional<std::filesystem::path> psa_csv;
  std::vector<std::string> focal;
  DesignConfig design;
  std::size_t S = 10'000;
  std::size_t Q = 50;
  std::size_t R = 5'000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  bool clamp_variance = true;
  std::size_t sir_pool_factor = 10;
  std::size_t max_terms = 4;
  std::optional<std::filesystem::path> output;
  SweepConfig sweep;
  std::optional<std::filesystem::path> summary_csv;
};

/// Thrown by parse_config with every problem found, one message each.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const noexcept { return errors_; }

 private:
  std::vector<std::string> errors_;
};

/// Parse and validate a JSON config document for `method`. An empty
/// document yields the defaults for that method.
RunConfig parse_config_text(const std::string& text, const std::string& method);
RunConfig parse_config(const std::filesystem::path& path, const std::string& method);

/// Execute a validated config. The result document goes to `config.output`
/// when set, otherwise to `out`; failures are reported as JSON on `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Map a subcommand name (evsi-mm, ...) to its method name (mm, ...).
std::optional<std::string> method_for_subcommand(const std::string& subcommand);

}  // namespace voi::cli
