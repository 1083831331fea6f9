#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "voi/rng.hpp"
#include "voi/types.hpp"

namespace voi {

/// Economic model: prior over theta plus a deterministic INB function.
class EconomicModel {
 public:
  virtual ~EconomicModel() = default;

  virtual std::string name() const = 0;
  virtual const std::vector<std::string>& parameter_names() const = 0;

  /// Fill `out` (length = parameter count) with one prior draw, using only `rng`.
  virtual void draw_prior(Rng& rng, std::span<double> out) const = 0;

  /// Pure function of theta.
  virtual double inb(std::span<const double> theta) const = 0;

  /// Reject focal subsets that would make psi depend on phi a priori
  /// (UnsupportedDependence). Independent priors accept everything.
  virtual void check_focal(const FocalSubset& focal) const { (void)focal; }

  /// Canonical description of the model and its hyperparameters, used to
  /// key cached oracle values.
  virtual std::string fingerprint() const { return name(); }

  std::size_t parameter_count() const { return parameter_names().size(); }
  ParameterVector draw_prior(Rng& rng) const;
  double inb(const ParameterVector& pv) const { return inb(pv.values()); }
};

/// Sampling distribution p(X | phi) of a proposed study. `phi` is always
/// ordered like `phi_names()`.
class DataGenerator {
 public:
  virtual ~DataGenerator() = default;

  virtual const StudyDesign& design() const = 0;
  virtual const std::vector<std::string>& phi_names() const = 0;

  virtual FutureDataset simulate(std::span<const double> phi, Rng& rng) const = 0;
  virtual double log_likelihood(std::span<const double> phi, const FutureDataset& data) const = 0;

  /// Generators with a conjugate prior/likelihood pair draw the focal
  /// posterior exactly instead of going through importance resampling.
  virtual bool conjugate() const { return false; }
  virtual PosteriorDraws sample_posterior(const FutureDataset& data, std::size_t R, Rng& rng) const;
};

}  // namespace voi
