#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "voi/error.hpp"
#include "voi/evppi.hpp"
#include "voi/models/chemo.hpp"
#include "voi/models/toy.hpp"
#include "voi/psa.hpp"

namespace voi {
namespace {

using models::ChemoHyperparameters;
using models::ChemoModel;
using models::ChemoTrialGenerator;
using models::ToyGenerator;
using models::ToyModel;

ParameterVector toy_pv(double pi1, double pi2, double delta) {
  return ParameterVector({"pi1", "pi2", "delta"}, {pi1, pi2, delta});
}

TEST(ToyInb, Examples) {
  EXPECT_DOUBLE_EQ(models::toy_inb(toy_pv(0.5, 0.5, 0.0)), 0.0);
  EXPECT_DOUBLE_EQ(models::toy_inb(toy_pv(0.47, 0.5, 3.0)), -6.0);
  EXPECT_DOUBLE_EQ(models::toy_inb(toy_pv(0.8, 0.2, 3.0)), 57.0);
  try {
    models::toy_inb(toy_pv(1.2, 0.5, 0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ModelEvaluation);
  }
  const ToyModel toy;
  EXPECT_DOUBLE_EQ(toy.inb(toy_pv(0.8, 0.2, 3.0)), 57.0);
  EXPECT_NEAR(toy.prior_mean_inb(), -100.0 / 7.0 - 3.0, 1e-12);
}

TEST(ToyGenerator, ExtremeProbabilities) {
  const ToyGenerator gen(20);
  auto rng = derive_stream(1, stream_id(StreamPurpose::Test, 0));
  const double one[] = {1.0}, zero[] = {0.0};
  EXPECT_EQ(gen.simulate(one, rng).count("x"), 20);
  EXPECT_EQ(gen.simulate(zero, rng).count("x"), 0);
}

TEST(ToyGenerator, SampleMeanRecoversProbability) {
  const ToyGenerator gen(50);
  auto rng = derive_stream(1, stream_id(StreamPurpose::Test, 1));
  const double phi[] = {0.3};
  double total = 0.0;
  for (int i = 0; i < 4000; ++i) total += static_cast<double>(gen.simulate(phi, rng).count("x"));
  const double p_hat = total / (4000.0 * 50.0);
  EXPECT_NEAR(p_hat, 0.3, 3.0 * std::sqrt(0.3 * 0.7 / 200000.0));
}

TEST(ToyGenerator, LogLikelihoodIsBinomial) {
  const ToyGenerator gen(20);
  FutureDataset data{{{"x", 7.0, 20}}, gen.design()};
  const double phi[] = {0.4};
  const double expected = std::log(77520.0) + 7 * std::log(0.4) + 13 * std::log(0.6);
  EXPECT_NEAR(gen.log_likelihood(phi, data), expected, 1e-10);
}

std::vector<double> chemo_mean_theta(const ChemoHyperparameters& h) {
  std::vector<double> t(14);
  t[0] = h.side_effect_soc.a / (h.side_effect_soc.a + h.side_effect_soc.b);
  t[1] = h.side_effect_new.a / (h.side_effect_new.a + h.side_effect_new.b);
  double sh = 0, sH = 0;
  for (std::size_t k = 0; k < 4; ++k) {
    sh += h.home_row[k];
    sH += h.hospital_row[k];
  }
  for (std::size_t k = 0; k < 4; ++k) {
    t[2 + k] = h.home_row[k] / sh;
    t[6 + k] = h.hospital_row[k] / sH;
  }
  t[10] = h.cost_home.shape * h.cost_home.scale;
  t[11] = h.cost_hospital.shape * h.cost_hospital.scale;
  t[12] = h.utility_home.a / (h.utility_home.a + h.utility_home.b);
  t[13] = h.utility_hospital.a / (h.utility_hospital.a + h.utility_hospital.b);
  return t;
}

TEST(ChemoModel, EqualSideEffectRatesGiveZero) {
  const ChemoModel m;
  auto t = chemo_mean_theta(m.hyperparameters());
  t[1] = t[0];
  EXPECT_EQ(m.inb(t), 0.0);
  EXPECT_EQ(chemo_inb(m, ParameterVector(m.parameter_names(), t)), 0.0);
}

TEST(ChemoModel, FewerSideEffectsDominate) {
  const ChemoModel m;
  auto t = chemo_mean_theta(m.hyperparameters());
  t[0] = 0.3;
  t[1] = 0.2;
  EXPECT_GT(m.inb(t), 0.0);
  const auto soc = m.arm_outcome(t, t[0]);
  const auto novel = m.arm_outcome(t, t[1]);
  EXPECT_LT(novel.cost, soc.cost);
  EXPECT_GT(novel.qaly, soc.qaly);
}

TEST(ChemoModel, DoublingCostsDoublesArmCost) {
  const ChemoModel m;
  auto t = chemo_mean_theta(m.hyperparameters());
  const auto base = m.arm_outcome(t, 0.3);
  t[10] *= 2;
  t[11] *= 2;
  const auto doubled = m.arm_outcome(t, 0.3);
  EXPECT_NEAR(doubled.cost, 2.0 * base.cost, 1e-9 * base.cost);
  EXPECT_EQ(doubled.qaly, base.qaly);
}

TEST(ChemoModel, CohortMassIsConserved) {
  const ChemoModel m;
  auto rng = derive_stream(3, stream_id(StreamPurpose::Test, 0));
  for (int i = 0; i < 200; ++i) {
    const auto pv = m.draw_prior(rng);
    for (const auto& state : m.cohort_trace(pv.values(), pv.values()[0])) {
      double total = 0.0;
      for (double v : state) {
        EXPECT_GE(v, 0.0);
        total += v;
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(ChemoModel, BrokenRowIsAModelError) {
  const ChemoModel m;
  auto t = chemo_mean_theta(m.hyperparameters());
  t[2] += 0.1;
  try {
    m.inb(t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ModelEvaluation);
  }
}

TEST(ChemoModel, PartialTransitionRowIsRejected) {
  const ChemoModel m;
  const std::vector<std::string> partial{"p_se_soc", "home_to_home", "home_to_dead"};
  const auto focal = FocalSubset::from_names(partial, m.parameter_names());
  try {
    m.check_focal(focal);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnsupportedDependence);
  }
  const auto names = ChemoModel::trial_focal_names();
  EXPECT_EQ(names.size(), 10u);
  EXPECT_NO_THROW(m.check_focal(FocalSubset::from_names(names, m.parameter_names())));
}

TEST(ChemoModel, PriorDecisionIsUncertainAndTrialParametersMatter) {
  const ChemoModel m;
  const auto psa = simulate_psa(m, 4000, 11);
  std::size_t positive = 0;
  for (double v : psa.inb) positive += v > 0.0 ? 1 : 0;
  const double share = static_cast<double>(positive) / 4000.0;
  EXPECT_GE(share, 0.2);
  EXPECT_LE(share, 0.8);

  const auto mom = inb_moments(psa);
  const double evpi = evppi(psa.inb, mom.mu_theta);
  RegressionConfig cfg;
  cfg.max_terms = 10;
  const auto cinb = fit_conditional_inb(psa, FocalSubset::from_names(ChemoModel::trial_focal_names(),
                                                                      m.parameter_names()), cfg);
  EXPECT_GE(evppi(cinb, mom.mu_theta), 0.5 * evpi);
}

TEST(ChemoTrialGenerator, TransitionCountsAreConsistent) {
  const ChemoModel m;
  const ChemoTrialGenerator gen(m.hyperparameters(), 150);
  auto rng = derive_stream(5, stream_id(StreamPurpose::Test, 0));
  for (int i = 0; i < 50; ++i) {
    const auto theta = m.draw_prior(rng);
    std::vector<double> phi(theta.values().begin(), theta.values().begin() + 10);
    const auto data = gen.simulate(phi, rng);
    EXPECT_NO_THROW(data.validate());
    std::int64_t from_home = 0, from_hosp = 0;
    for (const char* to : {"home", "hospital", "recovered", "dead"}) {
      from_home += data.count(std::string("home_to_") + to);
      from_hosp += data.count(std::string("hosp_to_") + to);
    }
    EXPECT_EQ(from_home, data.count("home_at_risk"));
    EXPECT_EQ(from_hosp, data.count("hosp_at_risk"));
    EXPECT_TRUE(std::isfinite(gen.log_likelihood(phi, data)));
  }
}

TEST(ChemoTrialGenerator, ConjugatePosteriorRowsAreDistributions) {
  const ChemoModel m;
  const ChemoTrialGenerator gen(m.hyperparameters(), 150);
  auto rng = derive_stream(6, stream_id(StreamPurpose::Test, 0));
  const auto theta = m.draw_prior(rng);
  std::vector<double> phi(theta.values().begin(), theta.values().begin() + 10);
  const auto post = gen.sample_posterior(gen.simulate(phi, rng), 100, rng);
  ASSERT_EQ(post.params.cols(), 10u);
  for (std::size_t r = 0; r < 100; ++r) {
    double home = 0, hosp = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      home += post.params(r, 2 + k);
      hosp += post.params(r, 6 + k);
    }
    EXPECT_NEAR(home, 1.0, 1e-12);
    EXPECT_NEAR(hosp, 1.0, 1e-12);
  }
}

TEST(ChemoHyperparameters, ShippedFileMatchesDefaults) {
  std::ifstream in(VOI_DATA_DIR "/chemo_standin_v1.json");
  ASSERT_TRUE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  const auto h = ChemoHyperparameters::from_json(ss.str());
  EXPECT_EQ(h.to_json(), ChemoHyperparameters{}.to_json());
  EXPECT_EQ(ChemoModel(h).fingerprint(), ChemoModel().fingerprint());
  EXPECT_THROW(ChemoHyperparameters::from_json(R"({"version": 2})"), Error);
  EXPECT_THROW(ChemoHyperparameters::from_json("not json"), Error);
}

}  // namespace
}  // namespace voi
