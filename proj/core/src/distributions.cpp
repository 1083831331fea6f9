#include "voi/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "voi/error.hpp"

namespace voi::dist {

double normal(Rng& rng, double mean, double sd) {
  return std::normal_distribution<double>(mean, sd)(rng);
}

double gamma(Rng& rng, double shape, double scale) {
  return std::gamma_distribution<double>(shape, scale)(rng);
}

double beta(Rng& rng, double a, double b) {
  const double x = gamma(rng, a, 1.0);
  const double y = gamma(rng, b, 1.0);
  return x / (x + y);
}

std::int64_t binomial(Rng& rng, std::int64_t n, double p) {
  if (n <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  return std::binomial_distribution<std::int64_t>(n, p)(rng);
}

void dirichlet(Rng& rng, std::span<const double> alpha, std::span<double> out) {
  double total = 0.0;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    out[k] = gamma(rng, alpha[k], 1.0);
    total += out[k];
  }
  for (std::size_t k = 0; k < alpha.size(); ++k) out[k] /= total;
}

void multinomial(Rng& rng, std::int64_t n, std::span<const double> probs, std::span<std::int64_t> out) {
  double remaining_mass = 0.0;
  for (double p : probs) remaining_mass += p;
  std::int64_t remaining = n;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (k + 1 == probs.size() || remaining == 0) {
      out[k] = remaining;
      for (std::size_t j = k + 1; j < probs.size(); ++j) out[j] = 0;
      return;
    }
    const double p = remaining_mass > 0.0 ? std::clamp(probs[k] / remaining_mass, 0.0, 1.0) : 0.0;
    out[k] = binomial(rng, remaining, p);
    remaining -= out[k];
    remaining_mass -= probs[k];
  }
}

double log_choose(std::int64_t n, std::int64_t k) {
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

double log_beta_fn(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

double binomial_log_pmf(std::int64_t x, std::int64_t n, double p) {
  if (x < 0 || x > n) return -INFINITY;
  double out = log_choose(n, x);
  if (x > 0) out += static_cast<double>(x) * std::log(p);
  if (n - x > 0) out += static_cast<double>(n - x) * std::log1p(-p);
  return out;
}

double beta_binomial_log_pmf(std::int64_t x, std::int64_t n, double a, double b) {
  if (x < 0 || x > n) return -INFINITY;
  return log_choose(n, x) + log_beta_fn(a + static_cast<double>(x), b + static_cast<double>(n - x)) -
         log_beta_fn(a, b);
}

}  // namespace voi::dist
