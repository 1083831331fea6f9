#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "voi/model.hpp"
#include "voi/types.hpp"

namespace voi {

struct InbMoments {
  double mu_theta = 0.0;
  double sigma2_theta = 0.0;
};

/// Draw S prior parameter vectors and evaluate the model on each. Row s uses
/// stream (seed, Psa/s), so runs with S and S+1 agree on the first S rows and
/// the result does not depend on `threads`.
PsaResult simulate_psa(const EconomicModel& model, std::size_t S, std::uint64_t seed, unsigned threads = 0);

InbMoments inb_moments(const PsaResult& psa);

/// CSV layout: header of parameter names followed by a literal `inb` column.
/// Values are written with 17 significant digits so a load reproduces the
/// doubles exactly.
PsaResult load_psa_csv(const std::filesystem::path& path);
void save_psa_csv(const PsaResult& psa, const std::filesystem::path& path);
void write_psa_csv(const PsaResult& psa, std::ostream& out);

std::string format_double(double v);

}  // namespace voi
