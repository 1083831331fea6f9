#include "voi/models/toy.hpp"

#include <cmath>
#include <sstream>

#include "voi/distributions.hpp"
#include "voi/error.hpp"

namespace voi::models {

ToyModel::ToyModel(ToyHyperparameters h) : h_(h) {
  if (h_.pi1_a <= 0 || h_.pi1_b <= 0 || h_.pi2_a <= 0 || h_.pi2_b <= 0 || h_.delta_variance < 0)
    throw Error(ErrorKind::InvalidArgument, "invalid toy hyperparameters");
}

void ToyModel::draw_prior(Rng& rng, std::span<double> out) const {
  out[0] = dist::beta(rng, h_.pi1_a, h_.pi1_b);
  out[1] = dist::beta(rng, h_.pi2_a, h_.pi2_b);
  out[2] = dist::normal(rng, h_.delta_mean, std::sqrt(h_.delta_variance));
}

double ToyModel::inb(std::span<const double> theta) const {
  return h_.wtp * (theta[0] - theta[1]) - theta[2];
}

std::string ToyModel::fingerprint() const {
  std::ostringstream s;
  s.precision(17);
  s << "toy;wtp=" << h_.wtp << ";pi1=Beta(" << h_.pi1_a << ',' << h_.pi1_b << ");pi2=Beta(" << h_.pi2_a << ','
    << h_.pi2_b << ");delta=Normal(" << h_.delta_mean << ',' << h_.delta_variance << ')';
  return s.str();
}

double ToyModel::prior_mean_inb() const {
  const double m1 = h_.pi1_a / (h_.pi1_a + h_.pi1_b);
  const double m2 = h_.pi2_a / (h_.pi2_a + h_.pi2_b);
  return h_.wtp * (m1 - m2) - h_.delta_mean;
}

double ToyModel::prior_variance_inb() const {
  auto beta_var = [](double a, double b) { return a * b / ((a + b) * (a + b) * (a + b + 1.0)); };
  return h_.wtp * h_.wtp * (beta_var(h_.pi1_a, h_.pi1_b) + beta_var(h_.pi2_a, h_.pi2_b)) + h_.delta_variance;
}

double toy_inb(const ParameterVector& pv, double wtp) {
  const double pi1 = pv.at("pi1");
  const double pi2 = pv.at("pi2");
  if (!(pi1 > 0.0 && pi1 < 1.0 && pi2 > 0.0 && pi2 < 1.0))
    throw Error(ErrorKind::ModelEvaluation, "toy probabilities must lie in (0, 1)");
  return wtp * (pi1 - pi2) - pv.at("delta");
}

ToyGenerator::ToyGenerator(std::int64_t n, double prior_a, double prior_b) : n_(n), a_(prior_a), b_(prior_b) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "trial size must be non-negative");
  design_.sizes["n"] = n;
}

FutureDataset ToyGenerator::simulate(std::span<const double> phi, Rng& rng) const {
  const auto x = dist::binomial(rng, n_, phi[0]);
  return {{{"x", static_cast<double>(x), n_}}, design_};
}

double ToyGenerator::log_likelihood(std::span<const double> phi, const FutureDataset& data) const {
  return dist::binomial_log_pmf(data.count("x"), n_, phi[0]);
}

PosteriorDraws ToyGenerator::sample_posterior(const FutureDataset& data, std::size_t R, Rng& rng) const {
  const auto x = data.count("x");
  if (x < 0 || x > n_) throw Error(ErrorKind::InvalidCount, "toy dataset count outside [0, n]");
  const double a = a_ + static_cast<double>(x);
  const double b = b_ + static_cast<double>(n_ - x);
  PosteriorDraws out{Matrix(R, 1)};
  for (std::size_t r = 0; r < R; ++r) out.params(r, 0) = dist::beta(rng, a, b);
  return out;
}

}  // namespace voi::models
