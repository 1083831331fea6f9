#pragma once

#include <string>
#include <vector>

#include "voi/model.hpp"

namespace voi::models {

/// A study that observes nothing: empty datasets, constant likelihood.
/// Posterior equals prior, so its EVSI is zero.
class FlatGenerator final : public DataGenerator {
 public:
  explicit FlatGenerator(std::vector<std::string> phi_names) : phi_names_(std::move(phi_names)) {
    design_.sizes["n"] = 0;
  }

  const StudyDesign& design() const override { return design_; }
  const std::vector<std::string>& phi_names() const override { return phi_names_; }
  FutureDataset simulate(std::span<const double>, Rng&) const override { return {{}, design_}; }
  double log_likelihood(std::span<const double>, const FutureDataset&) const override { return 0.0; }

 private:
  StudyDesign design_;
  std::vector<std::string> phi_names_;
};

}  // namespace voi::models
