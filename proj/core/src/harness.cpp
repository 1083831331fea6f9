#include "voi/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>

#include "voi/error.hpp"
#include "voi/mm.hpp"
#include "voi/oracle.hpp"
#include "voi/psa.hpp"
#include "voi/reduce.hpp"

namespace voi {

std::string model_hash(const EconomicModel& model, const DataGenerator& gen) {
  std::string key = model.fingerprint();
  for (const auto& [k, v] : gen.design().sizes) key += ";" + k + "=" + std::to_string(v);
  for (const auto& n : gen.phi_names()) key += ";phi=" + n;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : key) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::optional<CachedOracle> load_oracle_cache(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    const auto j = nlohmann::json::parse(in);
    return CachedOracle{j.at("value").get<double>(), j.at("S").get<std::size_t>(), j.at("R").get<std::size_t>(),
                        j.at("seed").get<std::uint64_t>(), j.at("model_hash").get<std::string>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, "oracle cache " + path.string() + ": " + e.what());
  }
}

void save_oracle_cache(const CachedOracle& c, const std::filesystem::path& path) {
  nlohmann::json j{{"value", c.value}, {"S", c.S}, {"R", c.R}, {"seed", c.seed}, {"model_hash", c.model_hash}};
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write oracle cache " + path.string());
  out << j.dump(2) << '\n';
}

double resolve_oracle(const EconomicModel& model, const DataGenerator& gen, const FocalSubset& focal,
                      const OracleSpec& spec, unsigned threads) {
  switch (spec.kind) {
    case OracleSpec::Kind::Fixed:
      return spec.value;
    case OracleSpec::Kind::Analytic: {
      const auto* toy = dynamic_cast<const models::ToyModel*>(&model);
      const auto* toy_gen = dynamic_cast<const models::ToyGenerator*>(&gen);
      if (!toy || !toy_gen)
        throw Error(ErrorKind::Validation, "the analytic oracle exists only for the toy model and its binomial trial");
      return toy_evsi_analytic(toy_gen->n(), toy->hyperparameters());
    }
    case OracleSpec::Kind::NestedMc: {
      const auto hash = model_hash(model, gen);
      if (spec.cache) {
        if (auto cached = load_oracle_cache(*spec.cache);
            cached && cached->S == spec.S && cached->R == spec.R && cached->seed == spec.seed &&
            cached->model_hash == hash)
          return cached->value;
      }
      const auto est = evsi_nested_mc(model, gen, focal, {spec.S, spec.R, spec.seed, threads});
      if (spec.cache) save_oracle_cache({est.value, spec.S, spec.R, spec.seed, hash}, *spec.cache);
      return est.value;
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unknown oracle kind");
}

SweepResult run_sweep(const EconomicModel& model, const DataGenerator& gen, const PsaResult& psa,
                      const ConditionalInb& cinb, const SweepConfig& config) {
  if (config.Q_values.empty() || config.budgets.empty())
    throw Error(ErrorKind::Validation, "sweep needs at least one Q value and one budget");
  if (config.repetitions < 2) throw Error(ErrorKind::Validation, "sweep needs at least 2 repetitions");

  auto qs = config.Q_values;
  auto budgets = config.budgets;
  std::sort(qs.begin(), qs.end());
  std::sort(budgets.begin(), budgets.end());

  SweepResult result;
  for (std::size_t budget : budgets)
    for (std::size_t Q : qs) {
      if (Q < 2) throw Error(ErrorKind::Validation, "Q values must be at least 2");
      const std::size_t R = budget / Q;
      if (R < 2)
        throw Error(ErrorKind::Validation,
                    "budget " + std::to_string(budget) + " / Q " + std::to_string(Q) + " leaves R < 2");
      SweepCell cell{Q, budget, R, budget % Q, std::vector<double>(config.repetitions)};
      if (cell.remainder > 0)
        result.warnings.push_back("budget " + std::to_string(budget) + " with Q=" + std::to_string(Q) +
                                  ": discarded remainder of " + std::to_string(cell.remainder) + " simulations");
      result.cells.push_back(std::move(cell));
    }

  result.oracle = resolve_oracle(model, gen, cinb.focal, config.oracle, config.threads);

  const std::size_t reps = config.repetitions;
  const std::size_t tasks = result.cells.size() * reps;
  std::vector<double> runtime(tasks);
  std::vector<char> low_q(result.cells.size(), 0);
  parallel_for(tasks, config.threads, [&](std::size_t t) {
    const std::size_t c = t / reps, r = t % reps;
    auto& cell = result.cells[c];
    MmConfig mm{cell.Q, cell.R, config.clamp_variance,
                derive_seed(config.base_seed, stream_id(StreamPurpose::Repetition, t)), 1, config.sir_pool_factor};
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto est = evsi_moment_matching(model, psa, cinb, gen, mm);
      cell.estimates[r] = est.value;
    } catch (const Error& e) {
      throw Error(e.kind(),
                  "sweep cell (Q=" + std::to_string(cell.Q) + ", budget=" + std::to_string(cell.budget) +
                      ") repetition " + std::to_string(r) + ": " + e.what(),
                  t);
    }
    runtime[t] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });

  for (std::size_t c = 0; c < result.cells.size(); ++c) {
    auto& cell = result.cells[c];
    cell.variance = sample_variance(cell.estimates);
    cell.bias = ordered_mean(cell.estimates) - result.oracle;
    cell.mean_runtime_s = ordered_mean(std::span<const double>(runtime).subspan(c * reps, reps));
    if (cell.Q < kRecommendedMinQ && !low_q[c]) {
      low_q[c] = 1;
      result.warnings.push_back(std::string(kLowQWarning) + ": cell Q=" + std::to_string(cell.Q) +
                                " is below the recommended minimum of 30");
    }
  }
  return result;
}

std::string summarize_sweep(const SweepResult& result) {
  auto cells = result.cells;
  std::stable_sort(cells.begin(), cells.end(), [](const SweepCell& a, const SweepCell& b) {
    return a.budget != b.budget ? a.budget < b.budget : a.Q < b.Q;
  });
  std::string out = "Q,budget,R,variance,bias,mean_runtime_s,repetitions\n";
  for (const auto& c : cells) {
    out += std::to_string(c.Q) + ',' + std::to_string(c.budget) + ',' + std::to_string(c.R) + ',' +
           format_double(c.variance) + ',' + format_double(c.bias) + ',' + format_double(c.mean_runtime_s) + ',' +
           std::to_string(c.estimates.size()) + '\n';
  }
  return out;
}

std::vector<SummaryRow> parse_sweep_summary(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  if (line != "Q,budget,R,variance,bias,mean_runtime_s,repetitions")
    throw Error(ErrorKind::ParseError, "unexpected sweep summary header", 1);
  std::vector<SummaryRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream cells(line);
    std::string cell;
    std::vector<std::string> v;
    while (std::getline(cells, cell, ',')) v.push_back(cell);
    if (v.size() != 7) throw Error(ErrorKind::ParseError, "sweep summary row has wrong arity", line_no);
    try {
      rows.push_back({std::stoul(v[0]), std::stoul(v[1]), std::stoul(v[2]), std::stod(v[3]), std::stod(v[4]),
                      std::stod(v[5]), std::stoul(v[6])});
    } catch (const std::exception&) {
      throw Error(ErrorKind::ParseError, "non-numeric sweep summary cell", line_no);
    }
  }
  return rows;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw Error(ErrorKind::InvalidArgument, "Spearman correlation needs two equal-length series of length >= 2");
  const auto rx = average_ranks(x), ry = average_ranks(y);
  const double mx = ordered_mean(rx), my = ordered_mean(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace voi
