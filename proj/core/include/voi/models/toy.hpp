#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "voi/model.hpp"

namespace voi::models {

/// Two-treatment cure-probability model:
///   INB = wtp * (pi1 - pi2) - delta,
///   pi1 ~ Beta(3, 4), pi2 ~ Beta(4, 3), delta ~ Normal(mean 3, variance 20).
struct ToyHyperparameters {
  double wtp = 100.0;
  double pi1_a = 3.0, pi1_b = 4.0;
  double pi2_a = 4.0, pi2_b = 3.0;
  double delta_mean = 3.0;
  double delta_variance = 20.0;
};

class ToyModel final : public EconomicModel {
 public:
  explicit ToyModel(ToyHyperparameters h = {});

  std::string name() const override { return "toy"; }
  const std::vector<std::string>& parameter_names() const override { return names_; }
  void draw_prior(Rng& rng, std::span<double> out) const override;
  double inb(std::span<const double> theta) const override;
  std::string fingerprint() const override;

  const ToyHyperparameters& hyperparameters() const noexcept { return h_; }

  double prior_mean_inb() const;
  double prior_variance_inb() const;

  using EconomicModel::draw_prior;
  using EconomicModel::inb;

 private:
  ToyHyperparameters h_;
  std::vector<std::string> names_{"pi1", "pi2", "delta"};
};

/// INB of a named (pi1, pi2, delta) vector; rejects probabilities outside (0, 1).
double toy_inb(const ParameterVector& pv, double wtp = 100.0);

/// X ~ Binomial(n, pi1), conjugate with pi1's Beta prior.
class ToyGenerator final : public DataGenerator {
 public:
  ToyGenerator(std::int64_t n, double prior_a = 3.0, double prior_b = 4.0);

  const StudyDesign& design() const override { return design_; }
  const std::vector<std::string>& phi_names() const override { return phi_names_; }
  FutureDataset simulate(std::span<const double> phi, Rng& rng) const override;
  double log_likelihood(std::span<const double> phi, const FutureDataset& data) const override;
  bool conjugate() const override { return true; }
  PosteriorDraws sample_posterior(const FutureDataset& data, std::size_t R, Rng& rng) const override;

  std::int64_t n() const noexcept { return n_; }

 private:
  std::int64_t n_;
  double a_, b_;
  StudyDesign design_;
  std::vector<std::string> phi_names_{"pi1"};
};

}  // namespace voi::models
