#include "voi/evppi.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "voi/error.hpp"
#include "voi/reduce.hpp"

namespace voi {

std::vector<double> cubic_bspline_basis(std::span<const double> knots, double x) {
  constexpr int degree = 3;
  const std::size_t n_knots = knots.size();
  std::vector<double> t;
  t.reserve(n_knots + 2 * degree);
  for (int i = 0; i < degree; ++i) t.push_back(knots.front());
  t.insert(t.end(), knots.begin(), knots.end());
  for (int i = 0; i < degree; ++i) t.push_back(knots.back());

  const std::size_t n_basis = n_knots + degree - 1;
  x = std::clamp(x, knots.front(), knots.back());

  // Degree-0 indicator on the span containing x; the last span is closed.
  std::vector<double> b(t.size() - 1, 0.0);
  std::size_t span = degree;
  while (span + 1 < t.size() - degree - 1 && x >= t[span + 1]) ++span;
  b[span] = 1.0;

  for (int d = 1; d <= degree; ++d) {
    for (std::size_t i = 0; i + d < t.size() - 1; ++i) {
      double v = 0.0;
      const double left = t[i + d] - t[i];
      const double right = t[i + d + 1] - t[i + 1];
      if (left > 0.0) v += (x - t[i]) / left * b[i];
      if (right > 0.0) v += (t[i + d + 1] - x) / right * b[i + 1];
      b[i] = v;
    }
  }
  b.resize(n_basis);
  return b;
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

ConditionalInb fit_conditional_inb(const PsaResult& psa, const FocalSubset& focal, const RegressionConfig& config) {
  psa.validate();
  const std::size_t S = psa.size();
  const std::size_t terms = focal.size();
  if (focal.parameter_count() != psa.params.cols())
    throw Error(ErrorKind::InvalidArgument, "focal subset does not match the PSA columns");
  if (terms > config.max_terms)
    throw Error(ErrorKind::FocalDimension, std::to_string(terms) + " focal parameters exceed the limit of " +
                                               std::to_string(config.max_terms) + " additive terms");
  if (S < 10 * terms)
    throw Error(ErrorKind::InvalidArgument, "need at least 10 PSA rows per focal parameter");
  if (config.knots < 2 || config.lambda_grid_size < 1)
    throw Error(ErrorKind::InvalidArgument, "regression needs >= 2 knots and a non-empty penalty grid");

  // Build the centred design column by column.
  std::vector<std::vector<double>> columns, standardised;
  std::vector<bool> penalised;
  for (std::size_t j = 0; j < terms; ++j) {
    const std::size_t c = focal.indices()[j];
    auto x = psa.params.column(c);
    const double mean = ordered_mean(x);
    const double var = sample_variance(x);
    if (!(var > 0.0))
      throw Error(ErrorKind::DegenerateFocal, "focal column '" + psa.names[c] + "' is constant", c);
    const double sd = std::sqrt(var);
    for (double& v : x) v = (v - mean) / sd;
    for (std::size_t i = 0; i < j; ++i) {
      double r = 0.0;
      for (std::size_t s = 0; s < S; ++s) r += x[s] * standardised[i][s];
      r /= static_cast<double>(S - 1);
      if (std::abs(r) > 1.0 - 1e-10)
        throw Error(ErrorKind::DegenerateFocal, "focal columns '" + psa.names[focal.indices()[i]] + "' and '" +
                                                    psa.names[c] + "' carry the same information", c);
    }
    standardised.push_back(x);

    auto sorted = x;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> knots;
    for (std::size_t k = 0; k < config.knots; ++k) {
      const double q = quantile_sorted(sorted, static_cast<double>(k) / static_cast<double>(config.knots - 1));
      if (knots.empty() || q > knots.back() + 1e-12 * (sorted.back() - sorted.front())) knots.push_back(q);
    }
    knots.back() = sorted.back();

    columns.push_back(x);
    penalised.push_back(false);
    const std::size_t first = columns.size();
    const std::size_t n_basis = knots.size() + 2;
    for (std::size_t k = 0; k < n_basis; ++k) columns.emplace_back(S);
    for (std::size_t s = 0; s < S; ++s) {
      const auto b = cubic_bspline_basis(knots, x[s]);
      for (std::size_t k = 0; k < n_basis; ++k) columns[first + k][s] = b[k];
    }
    for (std::size_t k = 0; k < n_basis; ++k) penalised.push_back(true);
  }

  // Linear terms that are exact combinations of earlier ones (the components
  // of a probability vector sum to one) are dropped; their splines stay.
  {
    std::vector<const std::vector<double>*> kept;
    std::vector<std::vector<double>> filtered;
    std::vector<bool> filtered_pen;
    for (std::size_t k = 0; k < columns.size(); ++k) {
      if (!penalised[k]) {
        kept.push_back(&columns[k]);
        const auto m = static_cast<Eigen::Index>(kept.size());
        Eigen::MatrixXd C(m, m);
        for (Eigen::Index a = 0; a < m; ++a)
          for (Eigen::Index b = 0; b <= a; ++b) {
            double acc = 0.0;
            for (std::size_t s = 0; s < S; ++s) acc += (*kept[a])[s] * (*kept[b])[s];
            C(a, b) = C(b, a) = acc / static_cast<double>(S - 1);
          }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(C);
        if (eig.eigenvalues().minCoeff() <= 1e-9 * std::max(eig.eigenvalues().maxCoeff(), 1.0)) {
          kept.pop_back();
          continue;
        }
      }
      filtered.push_back(columns[k]);
      filtered_pen.push_back(penalised[k]);
    }
    columns = std::move(filtered);
    penalised = std::move(filtered_pen);
  }

  const std::size_t p = columns.size();
  Eigen::MatrixXd X(static_cast<Eigen::Index>(S), static_cast<Eigen::Index>(p));
  for (std::size_t k = 0; k < p; ++k) {
    const double m = ordered_mean(columns[k]);
    for (std::size_t s = 0; s < S; ++s) X(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(k)) = columns[k][s] - m;
  }
  const double y_mean = ordered_mean(psa.inb);
  Eigen::VectorXd y(static_cast<Eigen::Index>(S));
  for (std::size_t s = 0; s < S; ++s) y(static_cast<Eigen::Index>(s)) = psa.inb[s] - y_mean;

  const Eigen::MatrixXd XtX = X.transpose() * X;
  const Eigen::VectorXd Xty = X.transpose() * y;

  double penalty_scale = 0.0;
  std::size_t n_pen = 0;
  for (std::size_t k = 0; k < p; ++k)
    if (penalised[k]) {
      penalty_scale += XtX(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
      ++n_pen;
    }
  penalty_scale = n_pen > 0 && penalty_scale > 0.0 ? penalty_scale / static_cast<double>(n_pen) : 1.0;

  const double n = static_cast<double>(S);
  double best_gcv = std::numeric_limits<double>::infinity();
  double best_lambda = 0.0, best_df = 0.0;
  Eigen::VectorXd best_beta;
  for (std::size_t g = 0; g < config.lambda_grid_size; ++g) {
    const double frac = config.lambda_grid_size == 1 ? 0.0 : static_cast<double>(g) / static_cast<double>(config.lambda_grid_size - 1);
    const double lambda = std::pow(10.0, config.log10_lambda_min + frac * (config.log10_lambda_max - config.log10_lambda_min));
    Eigen::MatrixXd A = XtX;
    for (std::size_t k = 0; k < p; ++k)
      if (penalised[k]) A(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) += lambda * penalty_scale;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    if (ldlt.info() != Eigen::Success) continue;
    const Eigen::VectorXd beta = ldlt.solve(Xty);
    const double rss = (y - X * beta).squaredNorm();
    const double df = ldlt.solve(XtX).trace() + 1.0;
    const double denom = n - df;
    if (!(denom > 0.0) || !std::isfinite(rss)) continue;
    const double gcv = n * rss / (denom * denom);
    if (gcv < best_gcv) {
      best_gcv = gcv;
      best_lambda = lambda;
      best_df = df;
      best_beta = beta;
    }
  }
  if (best_beta.size() == 0) throw Error(ErrorKind::DegenerateFocal, "penalised regression could not be solved");

  const Eigen::VectorXd fitted = X * best_beta;
  ConditionalInb out{std::vector<double>(S), focal, 0.0, best_lambda, best_df};
  for (std::size_t s = 0; s < S; ++s) out.values[s] = y_mean + fitted(static_cast<Eigen::Index>(s));
  out.sigma2_phi = sample_variance(out.values);
  return out;
}

double evppi(std::span<const double> conditional_inb, double mu_theta) {
  std::vector<double> pos(conditional_inb.size());
  std::transform(conditional_inb.begin(), conditional_inb.end(), pos.begin(), [](double v) { return std::max(0.0, v); });
  return std::max(0.0, ordered_mean(pos) - std::max(0.0, mu_theta));
}

double evppi(const ConditionalInb& cinb, double mu_theta) { return evppi(cinb.values, mu_theta); }

}  // namespace voi
