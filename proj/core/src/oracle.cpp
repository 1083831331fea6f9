#include "voi/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "voi/bayes.hpp"
#include "voi/distributions.hpp"
#include "voi/error.hpp"
#include "voi/mm.hpp"
#include "voi/reduce.hpp"

namespace voi {

EvsiEstimate evsi_nested_mc(const EconomicModel& model, const DataGenerator& gen, const FocalSubset& focal,
                            const NestedConfig& config) {
  if (config.S < 2 || config.R < 2) throw Error(ErrorKind::InvalidArgument, "nested Monte Carlo needs S, R >= 2");
  check_generator_focal(model, focal, gen);

  const std::size_t S = config.S;
  std::vector<double> prior_inb(S), positive_part(S);
  std::vector<char> low_ess(S, 0);
  parallel_for(S, config.threads, [&](std::size_t s) {
    try {
      auto outer = derive_stream(config.seed, stream_id(StreamPurpose::NestedOuter, s));
      auto data_rng = derive_stream(config.seed, stream_id(StreamPurpose::Dataset, s));
      auto post_rng = derive_stream(config.seed, stream_id(StreamPurpose::Posterior, s));

      std::vector<double> theta(model.parameter_count());
      model.draw_prior(outer, theta);
      prior_inb[s] = model.inb(theta);
      if (!std::isfinite(prior_inb[s])) throw Error(ErrorKind::ModelEvaluation, "non-finite prior INB");

      std::vector<double> phi(focal.size());
      for (std::size_t j = 0; j < focal.size(); ++j) phi[j] = theta[focal.indices()[j]];
      const auto data = gen.simulate(phi, data_rng);
      data.validate();

      PosteriorDraws posterior;
      if (gen.conjugate()) {
        posterior = gen.sample_posterior(data, config.R, post_rng);
      } else {
        const auto pool = prior_focal_pool(model, focal, config.sir_pool_factor * config.R, post_rng);
        auto sir = sir_posterior(pool, gen, data, config.R, post_rng);
        low_ess[s] = sir.low_ess ? 1 : 0;
        posterior = std::move(sir.draws);
      }
      const auto inb = posterior_inb_samples(model, focal, posterior, post_rng);
      positive_part[s] = std::max(0.0, ordered_mean(inb));
    } catch (const Error& e) {
      throw Error(e.kind(), "outer simulation " + std::to_string(s) + ": " + e.what(), s);
    }
  });

  EvsiEstimate est;
  est.method = Method::NestedMc;
  est.S = S;
  est.R = config.R;
  est.seed = config.seed;
  est.value = ordered_mean(positive_part) - std::max(0.0, ordered_mean(prior_inb));
  est.standard_error = std::sqrt(sample_variance(positive_part) / static_cast<double>(S));
  const auto n_low = std::count(low_ess.begin(), low_ess.end(), 1);
  if (n_low > 0)
    est.warnings.push_back("low_ess: importance resampling kept an effective sample size below 1% of R in " +
                           std::to_string(n_low) + " of " + std::to_string(S) + " outer simulations");
  return est;
}

double toy_evsi_analytic(std::int64_t n, const models::ToyHyperparameters& h) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "trial size must be non-negative");
  // Extended precision: consecutive n can have exactly equal EVSI, so the
  // enumeration error has to stay well below one double ulp.
  using real = long double;
  const real a = h.pi1_a, b = h.pi1_b, nn = static_cast<real>(n);
  const real m2 = static_cast<real>(h.pi2_a) / static_cast<real>(h.pi2_a + h.pi2_b);
  const real log_norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) - std::lgamma(a + b + nn) +
                        std::lgamma(nn + 1);
  real preposterior = 0.0L;
  for (std::int64_t x = 0; x <= n; ++x) {
    const real xx = static_cast<real>(x);
    const real v = static_cast<real>(h.wtp) * ((a + xx) / (a + b + nn) - m2) - static_cast<real>(h.delta_mean);
    if (v <= 0.0L) continue;
    const real log_pmf = log_norm + std::lgamma(a + xx) + std::lgamma(b + nn - xx) - std::lgamma(xx + 1) -
                         std::lgamma(nn - xx + 1);
    preposterior += std::exp(log_pmf) * v;
  }
  const double prior = h.wtp * (h.pi1_a / (h.pi1_a + h.pi1_b) - h.pi2_a / (h.pi2_a + h.pi2_b)) - h.delta_mean;
  return static_cast<double>(preposterior) - std::max(0.0, prior);
}

}  // namespace voi
