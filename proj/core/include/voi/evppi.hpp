#pragma once

#include <cstddef>
#include <vector>

#include "voi/types.hpp"

namespace voi {

/// Additive smoother settings. Each focal column gets an unpenalised linear
/// term plus a cubic B-spline basis on `knots` knots placed at the column's
/// quantiles; the spline coefficients carry a ridge penalty whose weight is
/// picked by generalised cross-validation over `lambda_grid_size` values
/// spaced evenly in log10 between `log10_lambda_min` and `log10_lambda_max`.
struct RegressionConfig {
  std::size_t knots = 10;
  std::size_t lambda_grid_size = 20;
  double log10_lambda_min = -6.0;
  double log10_lambda_max = 3.0;
  std::size_t max_terms = 4;
};

struct ConditionalInb {
  std::vector<double> values;
  FocalSubset focal;
  double sigma2_phi = 0.0;
  /// Selected penalty (relative to the mean diagonal of the spline block).
  double lambda = 0.0;
  double effective_df = 0.0;
};

ConditionalInb fit_conditional_inb(const PsaResult& psa, const FocalSubset& focal, const RegressionConfig& config = {});

/// mean(max(0, INB_phi)) - max(0, mu_theta), floored at zero.
double evppi(const ConditionalInb& cinb, double mu_theta);
double evppi(std::span<const double> conditional_inb, double mu_theta);

/// Evaluate every cubic B-spline basis function at `x` for the clamped knot
/// vector built from `knots` (sorted, distinct, first/last are the boundary).
std::vector<double> cubic_bspline_basis(std::span<const double> knots, double x);

}  // namespace voi
