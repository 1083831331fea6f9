#pragma once

#include <cstdint>
#include <span>

#include "voi/rng.hpp"

namespace voi::dist {

double normal(Rng& rng, double mean, double sd);
double gamma(Rng& rng, double shape, double scale);
double beta(Rng& rng, double a, double b);
std::int64_t binomial(Rng& rng, std::int64_t n, double p);

/// Dirichlet draw via normalised gammas; `out` has the length of `alpha`.
void dirichlet(Rng& rng, std::span<const double> alpha, std::span<double> out);

/// Multinomial by sequential conditional binomials. `probs` need not be
/// normalised.
void multinomial(Rng& rng, std::int64_t n, std::span<const double> probs, std::span<std::int64_t> out);

double log_choose(std::int64_t n, std::int64_t k);
double log_beta_fn(double a, double b);
double binomial_log_pmf(std::int64_t x, std::int64_t n, double p);
double beta_binomial_log_pmf(std::int64_t x, std::int64_t n, double a, double b);

}  // namespace voi::dist
