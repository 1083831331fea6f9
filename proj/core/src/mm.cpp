#include "voi/mm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "voi/bayes.hpp"
#include "voi/error.hpp"
#include "voi/psa.hpp"
#include "voi/reduce.hpp"

namespace voi {

std::vector<double> quantile_positions(std::size_t S, std::size_t Q) {
  std::vector<double> out(Q);
  for (std::size_t q = 1; q <= Q; ++q)
    out[q - 1] = static_cast<double>(q * S) / static_cast<double>(Q + 1);
  return out;
}

Matrix select_quantile_rows(const PsaResult& psa, const FocalSubset& focal, std::size_t Q) {
  const std::size_t S = psa.size();
  if (Q < 1) throw Error(ErrorKind::InvalidArgument, "Q must be at least 1");
  if (S < Q) throw Error(ErrorKind::InvalidArgument, "Q cannot exceed the number of PSA rows");

  Matrix out(Q, focal.size());
  for (std::size_t j = 0; j < focal.size(); ++j) {
    auto col = psa.params.column(focal.indices()[j]);
    std::sort(col.begin(), col.end());
    for (std::size_t q = 1; q <= Q; ++q) {
      // Exact integer arithmetic: position = q*S/(Q+1), 1-based.
      const std::size_t num = q * S;
      const std::size_t den = Q + 1;
      const std::size_t whole = num / den;
      double v;
      if (whole == 0)
        v = col.front();
      else if (num % den == 0)
        v = col[whole - 1];
      else
        v = 0.5 * (col[whole - 1] + col[whole]);
      out(q - 1, j) = v;
    }
  }
  return out;
}

void check_generator_focal(const EconomicModel& model, const FocalSubset& focal, const DataGenerator& gen) {
  if (focal.parameter_count() != model.parameter_count())
    throw Error(ErrorKind::InvalidArgument, "focal subset built for a different model");
  const auto& names = model.parameter_names();
  const auto& want = gen.phi_names();
  bool ok = want.size() == focal.size();
  for (std::size_t j = 0; ok && j < want.size(); ++j) ok = names[focal.indices()[j]] == want[j];
  if (!ok) {
    std::string list;
    for (const auto& w : want) list += (list.empty() ? "" : ", ") + w;
    throw Error(ErrorKind::InvalidArgument, "focal parameters must be exactly those the study informs: " + list);
  }
  model.check_focal(focal);
}

NestedVariance nested_posterior_variance(const EconomicModel& model, const FocalSubset& focal,
                                         const DataGenerator& gen, std::span<const double> phi_q, std::size_t R,
                                         std::uint64_t seed, std::size_t q, std::size_t sir_pool_factor) {
  if (R < 2) throw Error(ErrorKind::InvalidArgument, "R must be at least 2");
  auto data_rng = derive_stream(seed, stream_id(StreamPurpose::Dataset, q));
  auto post_rng = derive_stream(seed, stream_id(StreamPurpose::Posterior, q));

  const auto data = gen.simulate(phi_q, data_rng);
  data.validate();

  NestedVariance out;
  PosteriorDraws posterior;
  if (gen.conjugate()) {
    posterior = gen.sample_posterior(data, R, post_rng);
  } else {
    const auto pool = prior_focal_pool(model, focal, std::max<std::size_t>(1, sir_pool_factor) * R, post_rng);
    try {
      auto sir = sir_posterior(pool, gen, data, R, post_rng);
      posterior = std::move(sir.draws);
      out.ess = sir.ess;
      out.low_ess = sir.low_ess;
    } catch (const Error& e) {
      throw Error(e.kind(), "nested sample " + std::to_string(q) + ": " + e.what(), q);
    }
  }
  const auto inb = posterior_inb_samples(model, focal, posterior, post_rng);
  out.sigma2 = sample_variance(inb);
  return out;
}

double average_posterior_variance(std::span<const double> sigma2_q) {
  if (sigma2_q.empty()) throw Error(ErrorKind::InvalidArgument, "need at least one nested variance");
  return ordered_sum(sigma2_q) / static_cast<double>(sigma2_q.size());
}

std::vector<double> rescale_inb(std::span<const double> conditional_inb, double sigma2_phi, double mu_theta,
                                double sigma2_theta, double sigma2_x, bool clamp, bool* clamped) {
  if (!(sigma2_phi > 0.0))
    throw Error(ErrorKind::InvalidArgument, "INB_phi has zero variance; EVPPI for the focal set is zero");
  double radicand = sigma2_theta - sigma2_x;
  if (clamped) *clamped = false;
  if (radicand < 0.0) {
    if (!clamp)
      throw Error(ErrorKind::VarianceInflation,
                  "average posterior variance " + format_double(sigma2_x) + " exceeds prior INB variance " +
                      format_double(sigma2_theta) + "; Monte Carlo noise dominates a near-zero EVSI");
    radicand = 0.0;
    if (clamped) *clamped = true;
  }
  const double scale = std::sqrt(radicand);
  const double sd_phi = std::sqrt(sigma2_phi);
  std::vector<double> out(conditional_inb.size());
  for (std::size_t s = 0; s < out.size(); ++s)
    out[s] = ((conditional_inb[s] - mu_theta) / sd_phi) * scale + mu_theta;
  return out;
}

std::vector<double> rescale_inb(const ConditionalInb& cinb, double mu_theta, double sigma2_theta, double sigma2_x,
                                bool clamp, bool* clamped) {
  return rescale_inb(cinb.values, cinb.sigma2_phi, mu_theta, sigma2_theta, sigma2_x, clamp, clamped);
}

double evsi_from_rescaled(std::span<const double> rescaled, double mu_theta) {
  std::vector<double> pos(rescaled.size());
  std::transform(rescaled.begin(), rescaled.end(), pos.begin(), [](double v) { return std::max(0.0, v); });
  return ordered_mean(pos) - std::max(0.0, mu_theta);
}

EvsiEstimate evsi_moment_matching(const EconomicModel& model, const PsaResult& psa, const ConditionalInb& cinb,
                                  const DataGenerator& gen, const MmConfig& config) {
  if (config.Q < 2) throw Error(ErrorKind::InvalidArgument, "Q must be at least 2");
  if (config.R < 2) throw Error(ErrorKind::InvalidArgument, "R must be at least 2");
  if (cinb.values.size() != psa.size() || cinb.focal.parameter_count() != psa.params.cols())
    throw Error(ErrorKind::InvalidArgument, "conditional INB was not fitted on this PSA");
  check_generator_focal(model, cinb.focal, gen);

  EvsiEstimate est;
  est.method = Method::MomentMatching;
  est.S = psa.size();
  est.Q = config.Q;
  est.R = config.R;
  est.seed = config.seed;
  if (config.Q < kRecommendedMinQ)
    est.warnings.push_back(std::string(kLowQWarning) + ": Q=" + std::to_string(config.Q) +
                           " nested datasets is below the recommended minimum of 30");

  const auto moments = inb_moments(psa);
  const auto phi_rows = select_quantile_rows(psa, cinb.focal, config.Q);

  std::vector<NestedVariance> nested(config.Q);
  parallel_for(config.Q, config.threads, [&](std::size_t q) {
    nested[q] = nested_posterior_variance(model, cinb.focal, gen, phi_rows.row(q), config.R, config.seed, q,
                                          config.sir_pool_factor);
  });

  VarianceBundle bundle;
  bundle.mu_theta = moments.mu_theta;
  bundle.sigma2_theta = moments.sigma2_theta;
  bundle.sigma2_phi = cinb.sigma2_phi;
  bundle.sigma2_q.reserve(config.Q);
  std::size_t low_ess = 0;
  for (std::size_t q = 0; q < config.Q; ++q) {
    bundle.sigma2_q.push_back(nested[q].sigma2);
    if (nested[q].low_ess) ++low_ess;
  }
  bundle.sigma2_x = average_posterior_variance(bundle.sigma2_q);
  if (low_ess > 0)
    est.warnings.push_back("low_ess: importance resampling kept an effective sample size below 1% of R in " +
                           std::to_string(low_ess) + " of " + std::to_string(config.Q) + " nested samples");

  bool clamped = false;
  const auto rescaled = rescale_inb(cinb, bundle.mu_theta, bundle.sigma2_theta, bundle.sigma2_x,
                                    config.clamp_variance, &clamped);
  if (clamped)
    est.warnings.push_back("variance_clamped: average posterior variance " + format_double(bundle.sigma2_x) +
                           " exceeds prior INB variance " + format_double(bundle.sigma2_theta) +
                           "; EVSI reported as 0");
  // Jensen plus exact mean preservation makes the raw estimate >= 0; only
  // rounding residue below zero is flushed.
  const double raw = evsi_from_rescaled(rescaled, bundle.mu_theta);
  est.value = (raw < 0.0 && raw > -1e-9 * (1.0 + std::abs(bundle.mu_theta))) ? 0.0 : raw;
  est.bundle = std::move(bundle);
  return est;
}

}  // namespace voi
