#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "voi/model.hpp"

namespace voi::models {

// Four-state side-effect model: home care, hospital, recovered, dead.
// Recovered and dead are absorbing. Patients without side effects start in
// "recovered"; patients with side effects start in home care.
inline constexpr std::size_t kChemoStates = 4;

struct BetaPrior {
  double a, b;
};
struct GammaPrior {
  double shape, scale;
};

/// Default hyperparameters; serialised to data/chemo_standin_v1.json.
struct ChemoHyperparameters {
  int version = 1;
  BetaPrior side_effect_soc{45.0, 105.0};
  BetaPrior side_effect_new{42.0, 108.0};
  std::array<double, kChemoStates> home_row{40.0, 8.0, 45.0, 2.0};
  std::array<double, kChemoStates> hospital_row{20.0, 45.0, 30.0, 5.0};
  GammaPrior cost_home{16.0, 25.0};
  GammaPrior cost_hospital{16.0, 250.0};
  BetaPrior utility_home{60.0, 40.0};
  BetaPrior utility_hospital{30.0, 70.0};
  double utility_recovered = 0.85;
  int cycles = 15;
  double cycle_years = 1.0 / 52.0;
  double wtp = 30000.0;

  std::string to_json() const;
  static ChemoHyperparameters from_json(const std::string& text);
};

/// Parameter layout (14 inputs):
///   0 p_se_soc, 1 p_se_new,
///   2-5 home_to_{home,hospital,recovered,dead},
///   6-9 hosp_to_{home,hospital,recovered,dead},
///   10 cost_home, 11 cost_hospital, 12 utility_home, 13 utility_hospital.
class ChemoModel final : public EconomicModel {
 public:
  explicit ChemoModel(ChemoHyperparameters h = {});

  std::string name() const override { return "chemo"; }
  const std::vector<std::string>& parameter_names() const override { return names_; }
  void draw_prior(Rng& rng, std::span<double> out) const override;
  double inb(std::span<const double> theta) const override;
  void check_focal(const FocalSubset& focal) const override;
  std::string fingerprint() const override;

  const ChemoHyperparameters& hyperparameters() const noexcept { return h_; }

  /// Focal set informed by the trial: side-effect probabilities and both
  /// transition rows.
  static std::vector<std::string> trial_focal_names();

  struct ArmOutcome {
    double cost = 0.0;
    double qaly = 0.0;
  };
  ArmOutcome arm_outcome(std::span<const double> theta, double p_side_effect) const;

  /// State occupancy at the start of every cycle plus the final state
  /// (cycles + 1 vectors).
  std::vector<std::array<double, kChemoStates>> cohort_trace(std::span<const double> theta,
                                                             double p_side_effect) const;

  using EconomicModel::draw_prior;
  using EconomicModel::inb;

 private:
  ChemoHyperparameters h_;
  std::vector<std::string> names_;
};

double chemo_inb(const ChemoModel& model, const ParameterVector& pv);

/// Trial with n patients per arm: side-effect counts per arm, and every
/// patient with side effects followed through the Markov model for the full
/// cycle count, recording transition counts out of home care and hospital.
class ChemoTrialGenerator final : public DataGenerator {
 public:
  ChemoTrialGenerator(const ChemoHyperparameters& h, std::int64_t n_per_arm);

  const StudyDesign& design() const override { return design_; }
  const std::vector<std::string>& phi_names() const override { return phi_names_; }
  FutureDataset simulate(std::span<const double> phi, Rng& rng) const override;
  double log_likelihood(std::span<const double> phi, const FutureDataset& data) const override;
  bool conjugate() const override { return true; }
  PosteriorDraws sample_posterior(const FutureDataset& data, std::size_t R, Rng& rng) const override;

 private:
  ChemoHyperparameters h_;
  std::int64_t n_;
  StudyDesign design_;
  std::vector<std::string> phi_names_;
};

}  // namespace voi::models
