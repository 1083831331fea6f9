// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "../frozen_constants.hpp"
#include "voi/bayes.hpp"
#include "voi/distributions.hpp"
#include "voi/error.hpp"
#include "voi/evppi.hpp"
#include "voi/harness.hpp"
#include "voi/mm.hpp"
#include "voi/models/chemo.hpp"
#include "voi/models/flat.hpp"
#include "voi/models/toy.hpp"
#include "voi/oracle.hpp"
#include "voi/psa.hpp"
#include "voi/reduce.hpp"

namespace {

using namespace voi;
using models::FlatGenerator;
using models::ToyGenerator;
using models::ToyHyperparameters;
using models::ToyModel;

// Tolerances, fixed before any run.
constexpr double kC1MeanTolerance = 0.10;
constexpr double kC1RunTolerance = 0.25;
constexpr double kC1RunShare = 0.90;
constexpr std::size_t kC1Repetitions = 50;
constexpr double kC2CombinedSe = 3.0;
constexpr double kC5OneSidedZ = 1.6448536269514722;  // 5% one-sided
constexpr std::size_t kC5Repetitions = 50;
constexpr double kC6VarianceRel = 1e-9;
constexpr double kC6SirTolerance = 0.02;
constexpr double kC6MassTolerance = 1e-12;
constexpr double kC7FlatSe = 3.0;
constexpr double kC7PerfectRel = 0.05;

constexpr std::uint64_t kBaseSeed = 20240601;

struct Check {
  std::string label;
  bool ok;
  std::string detail;
};

class Criterion {
 public:
  explicit Criterion(std::string title) : title_(std::move(title)) {}

  void check(const std::string& label, bool ok, const std::string& detail) { checks_.push_back({label, ok, detail}); }

  bool passed() const {
    return std::all_of(checks_.begin(), checks_.end(), [](const Check& c) { return c.ok; });
  }

  void report(int number, double seconds) const {
    std::printf("criterion %d: %s - %s (%.1f s)\n", number, passed() ? "PASS" : "FAIL", title_.c_str(), seconds);
    for (const auto& c : checks_)
      std::printf("    [%s] %s: %s\n", c.ok ? "ok" : "FAILED", c.label.c_str(), c.detail.c_str());
    std::fflush(stdout);
  }

 private:
  std::string title_;
  std::vector<Check> checks_;
};

std::string fmt(const char* f, double a) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::uint64_t rep_seed(std::uint64_t criterion, std::uint64_t r) {
  return derive_seed(kBaseSeed + criterion, stream_id(StreamPurpose::Repetition, r));
}

double toy_mm(const ToyModel& toy, const DataGenerator& gen, std::size_t S, std::size_t Q, std::size_t R,
              std::uint64_t seed, unsigned threads = 0, EvsiEstimate* full = nullptr) {
  const auto psa = simulate_psa(toy, S, seed, threads);
  const auto cinb = fit_conditional_inb(psa, FocalSubset({0}, 3));
  MmConfig cfg;
  cfg.Q = Q;
  cfg.R = R;
  cfg.seed = seed;
  cfg.threads = threads;
  auto est = evsi_moment_matching(toy, psa, cinb, gen, cfg);
  if (full) *full = est;
  return est.value;
}

Criterion criterion1() {
  Criterion c("toy moment matching agrees with the exact EVSI (S=1e4, Q=50, R=5000, 50 runs)");
  const ToyModel toy;
  const ToyGenerator gen(20);
  const double oracle = toy_evsi_analytic(20);
  c.check("enumeration matches frozen constant", std::abs(oracle - test::kToyEvsiN20) < 1e-12,
          fmt("enumeration %.16g, frozen %.16g", oracle, test::kToyEvsiN20));

  std::vector<double> values(kC1Repetitions);
  for (std::size_t r = 0; r < kC1Repetitions; ++r) values[r] = toy_mm(toy, gen, 10'000, 50, 5'000, rep_seed(1, r));
  const double mean = ordered_mean(values);
  const auto within = std::count_if(values.begin(), values.end(), [&](double v) {
    return std::abs(v - test::kToyEvsiN20) <= kC1RunTolerance * test::kToyEvsiN20;
  });
  const double share = static_cast<double>(within) / static_cast<double>(kC1Repetitions);
  c.check("mean within 10%", std::abs(mean - test::kToyEvsiN20) <= kC1MeanTolerance * test::kToyEvsiN20,
          fmt("mean %.5f vs exact %.5f (relative error %.2f%%)", mean, test::kToyEvsiN20,
              100.0 * (mean - test::kToyEvsiN20) / test::kToyEvsiN20));
  c.check("at least 90% of runs within 25%", share >= kC1RunShare,
          fmt("%.0f%% of runs within 25%%, sd across runs %.4f", 100.0 * share, std::sqrt(sample_variance(values))));
  return c;
}

Criterion criterion2() {
  Criterion c("nested Monte Carlo (S=2000, R=2000) agrees with the exact EVSI");
  const ToyModel toy;
  NestedConfig cfg;
  cfg.S = 2000;
  cfg.R = 2000;
  cfg.seed = rep_seed(2, 0);
  const auto est = evsi_nested_mc(toy, ToyGenerator(20), FocalSubset({0}, 3), cfg);
  // The exact value carries no Monte Carlo error, so the combined SE is the
  // nested estimator's own.
  const double se = est.standard_error.value_or(0.0);
  const double z = (est.value - test::kToyEvsiN20) / se;
  c.check("within 3 combined standard errors", std::abs(z) <= kC2CombinedSe,
          fmt("nested %.5f, exact %.5f, z = %.2f", est.value, test::kToyEvsiN20, z));
  return c;
}

Criterion criterion3() {
  Criterion c("worked example arithmetic (mu=-4.5, sigma2_theta=722, sigma2_phi=391, sigma2_x=406)");
  constexpr double mu = -4.5, s2_theta = 722.0, s2_phi = 391.0;
  const double s2_x = average_posterior_variance(std::vector<double>{406.0, 406.0, 406.0});
  c.check("average posterior variance", s2_x == 406.0, fmt("%.17g", s2_x));

  // INB_phi values chosen so that their rescaled values are the example's
  // positives; the remaining six map to non-positive INB*.
  const std::vector<double> inb_star{4.0, -12.0, 10.0, -30.0, 29.0, -8.0, 2.0, -21.0, -4.5, -16.0};
  std::vector<double> inb_phi(inb_star.size());
  for (std::size_t s = 0; s < inb_star.size(); ++s)
    inb_phi[s] = (inb_star[s] - mu) / std::sqrt(s2_theta - s2_x) * std::sqrt(s2_phi) + mu;

  const auto rescaled = rescale_inb(inb_phi, s2_phi, mu, s2_theta, s2_x, false);
  bool display_exact = true;
  double worst = 0.0;
  for (std::size_t s = 0; s < inb_phi.size(); ++s) {
    const double by_hand = ((inb_phi[s] - (-4.5)) / std::sqrt(391.0)) * std::sqrt(722.0 - 406.0) + (-4.5);
    display_exact = display_exact && rescaled[s] == by_hand;
    worst = std::max(worst, std::abs(rescaled[s] - inb_star[s]));
  }
  c.check("rescaling reproduces the display exactly", display_exact, "tolerance 0 against the hand formula");

  const double evsi = evsi_from_rescaled(inb_star, mu);
  c.check("EVSI of (4, 10, 29, 2) and six non-positive values", evsi == 4.5,
          fmt("%.17g (the printed 4.6 comes from rounded INB* values)", evsi));
  const double round_trip = evsi_from_rescaled(rescaled, mu);
  c.check("EVSI through the rescaling", std::abs(round_trip - 4.5) <= 1e-12,
          fmt("%.17g, largest INB* round-off %.2g", round_trip, worst));
  return c;
}

Criterion criterion4() {
  Criterion c("quantile selection rule");
  PsaResult big;
  big.names = {"x"};
  big.params = Matrix(1000, 1);
  big.inb.assign(1000, 0.0);
  for (std::size_t i = 0; i < 1000; ++i) big.params(i, 0) = static_cast<double>(1000 - i);
  const auto rows = select_quantile_rows(big, FocalSubset({0}, 1), 3);
  c.check("S=1000, Q=3 picks elements 250/500/750",
          rows(0, 0) == 250.0 && rows(1, 0) == 500.0 && rows(2, 0) == 750.0,
          fmt("%.0f, %.0f, %.0f", rows(0, 0), rows(1, 0), rows(2, 0)));

  PsaResult small;
  small.names = {"pi1"};
  const std::vector<double> v{0.53, 0.26, 0.50, 0.76, 0.27, 0.59, 0.37, 0.30, 0.51, 0.47};
  small.params = Matrix(v.size(), 1);
  small.inb.assign(v.size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) small.params(i, 0) = v[i];
  const auto sel = select_quantile_rows(small, FocalSubset({0}, 1), 3);
  const bool ok = std::abs(sel(0, 0) - 0.285) < 1e-15 && sel(1, 0) == 0.47 && std::abs(sel(2, 0) - 0.52) < 1e-15;
  c.check("worked-example vector, Q=3", ok, fmt("%.17g, %.17g, %.17g", sel(0, 0), sel(1, 0), sel(2, 0)));
  return c;
}

Criterion criterion5() {
  Criterion c("Q and budget trade-off on the toy (budgets 5000 and 50000, Q=20..100, 50 runs per cell)");
  const ToyModel toy;
  const ToyGenerator gen(20);
  const auto psa = simulate_psa(toy, 10'000, rep_seed(5, 0));
  const auto cinb = fit_conditional_inb(psa, FocalSubset({0}, 3));
  SweepConfig cfg;
  cfg.Q_values = {20, 30, 40, 50, 60, 70, 80, 90, 100};
  cfg.budgets = {5'000, 50'000};
  cfg.repetitions = kC5Repetitions;
  cfg.base_seed = rep_seed(5, 1);
  const auto res = run_sweep(toy, gen, psa, cinb, cfg);

  for (std::size_t budget : cfg.budgets) {
    std::vector<double> q, var;
    for (const auto& cell : res.cells)
      if (cell.budget == budget) {
        q.push_back(static_cast<double>(cell.Q));
        var.push_back(cell.variance);
      }
    const double rho = spearman_correlation(q, var);
    c.check("(a) Spearman(Q, variance) < 0 at budget " + std::to_string(budget), rho < 0.0, fmt("rho = %.3f", rho));
  }

  for (std::size_t budget : cfg.budgets) {
    const SweepCell* q20 = nullptr;
    std::vector<const SweepCell*> rest;
    for (const auto& cell : res.cells)
      if (cell.budget == budget) {
        if (cell.Q == 20)
          q20 = &cell;
        else
          rest.push_back(&cell);
      }
    double mean_abs = 0.0, rest_var = 0.0;
    for (const auto* cell : rest) {
      mean_abs += std::abs(cell->bias);
      rest_var += cell->variance;
    }
    mean_abs /= static_cast<double>(rest.size());
    rest_var /= static_cast<double>(rest.size());
    const double reps = static_cast<double>(cfg.repetitions);
    // Standard error of |bias_20| - mean |bias_Q|, treating cells as
    // independent.
    const double se = std::sqrt(q20->variance / reps + rest_var / (reps * static_cast<double>(rest.size())));
    const double z = (std::abs(q20->bias) - mean_abs) / se;
    c.check("(b) |bias| at Q=20 exceeds mean |bias| over Q>=30 at budget " + std::to_string(budget),
            z > kC5OneSidedZ, fmt("|bias_20| = %.4f, mean |bias_Q>=30| = %.4f, z = %.2f", std::abs(q20->bias), mean_abs, z));
  }

  bool all_lower = true;
  std::string detail;
  for (std::size_t Q : cfg.Q_values) {
    double lo = 0.0, hi = 0.0;
    for (const auto& cell : res.cells)
      if (cell.Q == Q) (cell.budget == 50'000 ? lo : hi) = cell.variance;
    all_lower = all_lower && lo < hi;
    if (!(lo < hi)) detail += "Q=" + std::to_string(Q) + " ";
  }
  c.check("(c) variance at 50000 below variance at 5000 for every Q", all_lower,
          all_lower ? "all 9 Q values" : "violated at " + detail);

  std::printf("    sweep summary (oracle %.6f):\n", res.oracle);
  for (const auto& cell : res.cells)
    std::printf("      budget %6zu Q %3zu R %5zu variance %.5f bias %+.5f\n", cell.budget, cell.Q, cell.R, cell.variance,
                cell.bias);
  return c;
}

Criterion criterion6() {
  Criterion c("invariants");
  const ToyModel toy;

  {
    const auto psa = simulate_psa(toy, 5000, rep_seed(6, 0));
    const auto cinb = fit_conditional_inb(psa, FocalSubset({0}, 3));
    const auto m = inb_moments(psa);
    double worst = 0.0;
    for (double frac : {0.05, 0.3, 0.6, 0.95}) {
      const double s2x = frac * m.sigma2_theta;
      const auto out = rescale_inb(cinb, m.mu_theta, m.sigma2_theta, s2x, false);
      const double target = m.sigma2_theta - s2x;
      worst = std::max(worst, std::abs(sample_variance(out) - target) / target);
    }
    c.check("variance identity of INB*", worst <= kC6VarianceRel, fmt("largest relative error %.2g", worst));
  }

  {
    auto rng = derive_stream(kBaseSeed, stream_id(StreamPurpose::Test, 6));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t negatives = 0, bound_checked = 0, bound_broken = 0;
    for (int i = 0; i < 100; ++i) {
      ToyHyperparameters h;
      h.wtp = 20.0 + 480.0 * u(rng);
      h.pi1_a = 1.0 + 9.0 * u(rng);
      h.pi1_b = 1.0 + 9.0 * u(rng);
      h.pi2_a = 1.0 + 9.0 * u(rng);
      h.pi2_b = 1.0 + 9.0 * u(rng);
      h.delta_mean = -10.0 + 20.0 * u(rng);
      h.delta_variance = 1.0 + 49.0 * u(rng);
      const auto n = static_cast<std::int64_t>(1 + 200 * u(rng));
      const ToyModel model(h);
      const ToyGenerator gen(n, h.pi1_a, h.pi1_b);
      const auto psa = simulate_psa(model, 1000, rep_seed(6, 100 + static_cast<std::uint64_t>(i)));
      const auto cinb = fit_conditional_inb(psa, FocalSubset({0}, 3));
      MmConfig cfg;
      cfg.Q = 30;
      cfg.R = 200;
      cfg.seed = rep_seed(6, 300 + static_cast<std::uint64_t>(i));
      const auto est = evsi_moment_matching(model, psa, cinb, gen, cfg);
      if (est.value < 0.0) ++negatives;
      const auto& b = *est.bundle;
      if (b.sigma2_x >= b.sigma2_theta - b.sigma2_phi) {
        ++bound_checked;
        if (est.value > evppi(cinb, b.mu_theta) + 1e-12) ++bound_broken;
      }
    }
    c.check("EVSI >= 0 on 100 random toy configurations", negatives == 0,
            std::to_string(negatives) + " negative estimates");
    c.check("EVSI <= EVPPI whenever the scale factor is at most 1", bound_broken == 0,
            std::to_string(bound_checked) + " configurations in scope, " + std::to_string(bound_broken) + " violations");
  }

  {
    bool mono = true;
    double prev = 0.0;
    for (std::int64_t n = 0; n <= 1000; ++n) {
      const double v = toy_evsi_analytic(n);
      mono = mono && v >= prev;
      prev = v;
    }
    c.check("exact EVSI nondecreasing in n (0..1000)", mono, fmt("EVSI(1000) = %.6f", prev));
  }

  {
    const ToyGenerator gen(20);
    double worst = 0.0;
    for (std::int64_t x : {3, 12, 20}) {
      auto rng = derive_stream(kBaseSeed, stream_id(StreamPurpose::SirPool, static_cast<std::uint64_t>(x)));
      const FutureDataset data{{{"x", static_cast<double>(x), 20}}, gen.design()};
      const auto pool = prior_focal_pool(toy, FocalSubset({0}, 3), 100'000, rng);
      const auto sir = sir_posterior(pool, gen, data, 1000, rng);
      const double conj = (3.0 + static_cast<double>(x)) / 27.0;
      worst = std::max(worst, std::abs(ordered_mean(sir.draws.params.column(0)) - conj));
    }
    c.check("SIR and conjugate posterior means agree (pool 1e5)", worst <= kC6SirTolerance,
            fmt("largest gap %.4f over x = 3, 12, 20 of 20", worst));
  }

  {
    const models::ChemoModel chemo;
    auto rng = derive_stream(kBaseSeed, stream_id(StreamPurpose::Test, 60));
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const auto pv = chemo.draw_prior(rng);
      for (double p : {pv.values()[0], pv.values()[1]})
        for (const auto& state : chemo.cohort_trace(pv.values(), p)) {
          double total = 0.0;
          for (double v : state) total += v;
          worst = std::max(worst, std::abs(total - 1.0));
        }
    }
    c.check("chemo cohort mass conservation", worst <= kC6MassTolerance, fmt("largest deviation %.2g", worst));
  }

  {
    const ToyGenerator gen(20);
    const std::uint64_t seed = rep_seed(6, 999);
    bool identical = true;
    EvsiEstimate base;
    toy_mm(toy, gen, 3000, 40, 500, seed, 1, &base);
    for (unsigned threads : {1u, 2u, 8u}) {
      EvsiEstimate again;
      toy_mm(toy, gen, 3000, 40, 500, seed, threads, &again);
      identical = identical && again.value == base.value && again.bundle->sigma2_q == base.bundle->sigma2_q;
      identical = identical && simulate_psa(toy, 3000, seed, threads).params == simulate_psa(toy, 3000, seed, 1).params;
    }
    NestedConfig nc;
    nc.S = 300;
    nc.R = 300;
    nc.seed = seed;
    nc.threads = 1;
    const auto n1 = evsi_nested_mc(toy, gen, FocalSubset({0}, 3), nc);
    nc.threads = 8;
    const auto n8 = evsi_nested_mc(toy, gen, FocalSubset({0}, 3), nc);
    identical = identical && n1.value == n8.value;
    c.check("bit-identical reruns across thread counts 1, 2, 8", identical,
            fmt("moment matching %.17g, nested %.17g", base.value, n1.value));
  }
  return c;
}

Criterion criterion7() {
  Criterion c("zero and perfect information limits");
  const ToyModel toy;
  {
    const FlatGenerator flat({"pi1"});
    std::vector<double> values(20);
    for (std::size_t r = 0; r < values.size(); ++r) values[r] = toy_mm(toy, flat, 10'000, 50, 5'000, rep_seed(7, r));
    const double mean = ordered_mean(values);
    const double sd = std::sqrt(sample_variance(values));
    c.check("moment matching, study observing nothing", mean >= 0.0 && mean <= kC7FlatSe * sd + 1e-12,
            fmt("mean %.3g over 20 runs, run-to-run sd %.3g", mean, sd));

    NestedConfig nc;
    nc.S = 2000;
    nc.R = 500;
    nc.seed = rep_seed(7, 100);
    const auto est = evsi_nested_mc(toy, flat, FocalSubset({0}, 3), nc);
    const double se = est.standard_error.value_or(0.0);
    c.check("nested Monte Carlo, study observing nothing", std::abs(est.value) <= kC7FlatSe * se + 1e-12,
            fmt("value %.3g, standard error %.3g", est.value, se));
  }
  {
    const double v = toy_mm(toy, ToyGenerator(100'000), 100'000, 50, 5'000, rep_seed(7, 200));
    const double rel = (v - test::kToyEvppiPi1) / test::kToyEvppiPi1;
    c.check("n=1e5 trial within 5% of the EVPPI", std::abs(rel) <= kC7PerfectRel,
            fmt("estimate %.5f, EVPPI %.5f, relative error %.2f%%", v, test::kToyEvppiPi1, 100.0 * rel));
  }
  return c;
}

}  // namespace

int main() {
  const std::vector<std::function<Criterion()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                         criterion5, criterion6, criterion7};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto c = criteria[i]();
      c.report(static_cast<int>(i + 1),
               std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
      if (!c.passed()) ++failed;
    } catch (const std::exception& e) {
      std::printf("criterion %zu: FAIL - exception: %s\n", i + 1, e.what());
      ++failed;
    }
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed;
}
