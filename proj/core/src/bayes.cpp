#include "voi/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "voi/error.hpp"

namespace voi {

BetaParams beta_binomial_update(double alpha, double beta, std::int64_t n, std::int64_t x) {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw Error(ErrorKind::InvalidArgument, "Beta hyperparameters must be positive");
  if (n < 0 || x < 0 || x > n)
    throw Error(ErrorKind::InvalidCount, "count " + std::to_string(x) + " not within [0, " + std::to_string(n) + "]");
  return {alpha + static_cast<double>(x), beta + static_cast<double>(n - x)};
}

std::vector<double> dirichlet_multinomial_update(std::span<const double> alpha, std::span<const std::int64_t> counts) {
  if (alpha.size() != counts.size() || alpha.size() < 2)
    throw Error(ErrorKind::InvalidCount, "Dirichlet prior and counts must have equal length >= 2");
  std::vector<double> out(alpha.size());
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    if (!(alpha[k] > 0.0)) throw Error(ErrorKind::InvalidArgument, "Dirichlet hyperparameters must be positive", k);
    if (counts[k] < 0) throw Error(ErrorKind::InvalidCount, "negative count", k);
    out[k] = alpha[k] + static_cast<double>(counts[k]);
  }
  return out;
}

SirResult sir_posterior(const Matrix& prior_draws, const DataGenerator& gen, const FutureDataset& data,
                        std::size_t R, Rng& rng) {
  const std::size_t pool = prior_draws.rows();
  if (pool == 0 || R < 2) throw Error(ErrorKind::InvalidArgument, "SIR needs a prior pool and R >= 2");

  std::vector<double> logw(pool);
  double max_logw = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pool; ++i) {
    const double lw = gen.log_likelihood(prior_draws.row(i), data);
    logw[i] = std::isnan(lw) ? -std::numeric_limits<double>::infinity() : lw;
    if (logw[i] > max_logw) max_logw = logw[i];
  }
  if (!std::isfinite(max_logw))
    throw Error(ErrorKind::DegenerateWeights, "every importance weight is zero or non-finite");

  std::vector<double> cumulative(pool);
  double total = 0.0, total_sq = 0.0;
  for (std::size_t i = 0; i < pool; ++i) {
    const double w = std::exp(logw[i] - max_logw);
    total += w;
    total_sq += w * w;
    cumulative[i] = total;
  }

  SirResult out{{Matrix(R, prior_draws.cols())}, total * total / total_sq, false};
  out.low_ess = out.ess < 0.01 * static_cast<double>(R);

  std::uniform_real_distribution<double> unif(0.0, total);
  for (std::size_t r = 0; r < R; ++r) {
    const double u = unif(rng);
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const auto pick = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cumulative.begin(), pool - 1));
    std::ranges::copy(prior_draws.row(pick), out.draws.params.row(r).begin());
  }
  return out;
}

std::vector<double> posterior_inb_samples(const EconomicModel& model, const FocalSubset& focal,
                                          const PosteriorDraws& posterior_focal, Rng& rng) {
  const std::size_t R = posterior_focal.size();
  if (R < 2) throw Error(ErrorKind::InvalidArgument, "posterior INB needs R >= 2");
  if (posterior_focal.params.cols() != focal.size())
    throw Error(ErrorKind::InvalidArgument, "posterior draws do not match the focal subset");
  if (focal.parameter_count() != model.parameter_count())
    throw Error(ErrorKind::InvalidArgument, "focal subset built for a different model");

  const auto idx = focal.indices();
  std::vector<double> theta(model.parameter_count());
  std::vector<double> out(R);
  for (std::size_t r = 0; r < R; ++r) {
    model.draw_prior(rng, theta);
    const auto post = posterior_focal.params.row(r);
    for (std::size_t j = 0; j < idx.size(); ++j) theta[idx[j]] = post[j];
    out[r] = model.inb(theta);
    if (!std::isfinite(out[r]))
      throw Error(ErrorKind::ModelEvaluation, "non-finite posterior INB at draw " + std::to_string(r), r);
  }
  return out;
}

Matrix prior_focal_pool(const EconomicModel& model, const FocalSubset& focal, std::size_t rows, Rng& rng) {
  const auto idx = focal.indices();
  std::vector<double> theta(model.parameter_count());
  Matrix pool(rows, idx.size());
  for (std::size_t i = 0; i < rows; ++i) {
    model.draw_prior(rng, theta);
    for (std::size_t j = 0; j < idx.size(); ++j) pool(i, j) = theta[idx[j]];
  }
  return pool;
}

}  // namespace voi
