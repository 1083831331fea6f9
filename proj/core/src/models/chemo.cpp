#include "voi/models/chemo.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include "voi/bayes.hpp"
#include "voi/distributions.hpp"
#include "voi/error.hpp"

namespace voi::models {

namespace {

constexpr std::array<const char*, kChemoStates> kStateNames{"home", "hospital", "recovered", "dead"};
constexpr std::size_t kHome = 0, kHospital = 1, kRecovered = 2, kDead = 3;
constexpr std::size_t kHomeRow = 2, kHospitalRow = 6;
constexpr std::size_t kCostHome = 10, kCostHospital = 11, kUtilHome = 12, kUtilHospital = 13;

using nlohmann::json;

json beta_json(const BetaPrior& p) { return {{"a", p.a}, {"b", p.b}}; }
json gamma_json(const GammaPrior& p) { return {{"shape", p.shape}, {"scale", p.scale}}; }
BetaPrior beta_from(const json& j) { return {j.at("a").get<double>(), j.at("b").get<double>()}; }
GammaPrior gamma_from(const json& j) { return {j.at("shape").get<double>(), j.at("scale").get<double>()}; }

void check_row(std::span<const double> row, const char* label) {
  double sum = 0.0;
  for (double p : row) {
    if (!(p >= 0.0)) throw Error(ErrorKind::ModelEvaluation, std::string(label) + " transition row has a negative entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw Error(ErrorKind::ModelEvaluation, std::string(label) + " transition row does not sum to 1");
}

std::array<double, kChemoStates> normalised(std::span<const double> row) {
  std::array<double, kChemoStates> out{};
  double sum = 0.0;
  for (std::size_t k = 0; k < kChemoStates; ++k) sum += row[k];
  for (std::size_t k = 0; k < kChemoStates; ++k) out[k] = row[k] / sum;
  return out;
}

std::string row_outcome(const char* from, std::size_t to) {
  return std::string(from) + "_to_" + kStateNames[to];
}

}  // namespace

std::string ChemoHyperparameters::to_json() const {
  json j;
  j["version"] = version;
  j["side_effect_soc"] = beta_json(side_effect_soc);
  j["side_effect_new"] = beta_json(side_effect_new);
  j["home_row_dirichlet"] = home_row;
  j["hospital_row_dirichlet"] = hospital_row;
  j["cost_home"] = gamma_json(cost_home);
  j["cost_hospital"] = gamma_json(cost_hospital);
  j["utility_home"] = beta_json(utility_home);
  j["utility_hospital"] = beta_json(utility_hospital);
  j["utility_recovered"] = utility_recovered;
  j["cycles"] = cycles;
  j["cycle_years"] = cycle_years;
  j["wtp"] = wtp;
  return j.dump(2);
}

ChemoHyperparameters ChemoHyperparameters::from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    ChemoHyperparameters h;
    h.version = j.at("version").get<int>();
    if (h.version != 1)
      throw Error(ErrorKind::ParseError, "unsupported chemo hyperparameter version " + std::to_string(h.version));
    h.side_effect_soc = beta_from(j.at("side_effect_soc"));
    h.side_effect_new = beta_from(j.at("side_effect_new"));
    h.home_row = j.at("home_row_dirichlet").get<std::array<double, kChemoStates>>();
    h.hospital_row = j.at("hospital_row_dirichlet").get<std::array<double, kChemoStates>>();
    h.cost_home = gamma_from(j.at("cost_home"));
    h.cost_hospital = gamma_from(j.at("cost_hospital"));
    h.utility_home = beta_from(j.at("utility_home"));
    h.utility_hospital = beta_from(j.at("utility_hospital"));
    h.utility_recovered = j.at("utility_recovered").get<double>();
    h.cycles = j.at("cycles").get<int>();
    h.cycle_years = j.at("cycle_years").get<double>();
    h.wtp = j.at("wtp").get<double>();
    return h;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("chemo hyperparameters: ") + e.what());
  }
}

ChemoModel::ChemoModel(ChemoHyperparameters h) : h_(h) {
  if (h_.cycles < 1) throw Error(ErrorKind::InvalidArgument, "chemo model needs at least one cycle");
  names_ = {"p_se_soc", "p_se_new"};
  for (const char* from : {"home", "hosp"})
    for (std::size_t to = 0; to < kChemoStates; ++to) names_.push_back(row_outcome(from, to));
  names_.insert(names_.end(), {"cost_home", "cost_hospital", "utility_home", "utility_hospital"});
}

std::vector<std::string> ChemoModel::trial_focal_names() {
  std::vector<std::string> out{"p_se_soc", "p_se_new"};
  for (const char* from : {"home", "hosp"})
    for (std::size_t to = 0; to < kChemoStates; ++to) out.push_back(row_outcome(from, to));
  return out;
}

void ChemoModel::draw_prior(Rng& rng, std::span<double> out) const {
  out[0] = dist::beta(rng, h_.side_effect_soc.a, h_.side_effect_soc.b);
  out[1] = dist::beta(rng, h_.side_effect_new.a, h_.side_effect_new.b);
  dist::dirichlet(rng, h_.home_row, out.subspan(kHomeRow, kChemoStates));
  dist::dirichlet(rng, h_.hospital_row, out.subspan(kHospitalRow, kChemoStates));
  out[kCostHome] = dist::gamma(rng, h_.cost_home.shape, h_.cost_home.scale);
  out[kCostHospital] = dist::gamma(rng, h_.cost_hospital.shape, h_.cost_hospital.scale);
  out[kUtilHome] = dist::beta(rng, h_.utility_home.a, h_.utility_home.b);
  out[kUtilHospital] = dist::beta(rng, h_.utility_hospital.a, h_.utility_hospital.b);
}

std::vector<std::array<double, kChemoStates>> ChemoModel::cohort_trace(std::span<const double> theta,
                                                                       double p_side_effect) const {
  const auto home = theta.subspan(kHomeRow, kChemoStates);
  const auto hosp = theta.subspan(kHospitalRow, kChemoStates);
  check_row(home, "home");
  check_row(hosp, "hospital");

  std::vector<std::array<double, kChemoStates>> trace;
  trace.reserve(static_cast<std::size_t>(h_.cycles) + 1);
  std::array<double, kChemoStates> m{p_side_effect, 0.0, 1.0 - p_side_effect, 0.0};
  trace.push_back(m);
  for (int t = 0; t < h_.cycles; ++t) {
    std::array<double, kChemoStates> next{};
    for (std::size_t k = 0; k < kChemoStates; ++k) next[k] = m[kHome] * home[k] + m[kHospital] * hosp[k];
    next[kRecovered] += m[kRecovered];
    next[kDead] += m[kDead];
    m = next;
    trace.push_back(m);
  }
  return trace;
}

ChemoModel::ArmOutcome ChemoModel::arm_outcome(std::span<const double> theta, double p_side_effect) const {
  const auto trace = cohort_trace(theta, p_side_effect);
  ArmOutcome out;
  for (int t = 0; t < h_.cycles; ++t) {
    const auto& m = trace[static_cast<std::size_t>(t)];
    out.cost += theta[kCostHome] * m[kHome] + theta[kCostHospital] * m[kHospital];
    out.qaly += (theta[kUtilHome] * m[kHome] + theta[kUtilHospital] * m[kHospital] +
                 h_.utility_recovered * m[kRecovered]) *
                h_.cycle_years;
  }
  return out;
}

double ChemoModel::inb(std::span<const double> theta) const {
  const auto soc = arm_outcome(theta, theta[0]);
  const auto novel = arm_outcome(theta, theta[1]);
  return h_.wtp * (novel.qaly - soc.qaly) - (novel.cost - soc.cost);
}

void ChemoModel::check_focal(const FocalSubset& focal) const {
  for (std::size_t start : {kHomeRow, kHospitalRow}) {
    std::size_t inside = 0;
    for (std::size_t k = 0; k < kChemoStates; ++k) inside += focal.contains(start + k) ? 1 : 0;
    if (inside != 0 && inside != kChemoStates)
      throw Error(ErrorKind::UnsupportedDependence,
                  "a transition row must be entirely focal or entirely non-focal (Dirichlet components are dependent)");
  }
}

std::string ChemoModel::fingerprint() const { return "chemo;" + nlohmann::json::parse(h_.to_json()).dump(); }

double chemo_inb(const ChemoModel& model, const ParameterVector& pv) {
  if (pv.names() != model.parameter_names())
    throw Error(ErrorKind::InvalidArgument, "parameter vector does not follow the chemo model layout");
  return model.inb(pv.values());
}

ChemoTrialGenerator::ChemoTrialGenerator(const ChemoHyperparameters& h, std::int64_t n_per_arm)
    : h_(h), n_(n_per_arm), phi_names_(ChemoModel::trial_focal_names()) {
  if (n_per_arm < 0) throw Error(ErrorKind::InvalidArgument, "n_per_arm must be non-negative");
  design_.sizes["n_per_arm"] = n_per_arm;
  design_.sizes["follow_up_cycles"] = h_.cycles;
}

// phi: p_se_soc, p_se_new, home row (4), hospital row (4). Rows are
// renormalised because quantile-selected rows need not sum to one.
FutureDataset ChemoTrialGenerator::simulate(std::span<const double> phi, Rng& rng) const {
  const auto home = normalised(phi.subspan(2, kChemoStates));
  const auto hosp = normalised(phi.subspan(6, kChemoStates));
  const auto x_soc = dist::binomial(rng, n_, phi[0]);
  const auto x_new = dist::binomial(rng, n_, phi[1]);

  std::array<std::int64_t, kChemoStates> home_counts{}, hosp_counts{}, step{};
  std::int64_t in_home = x_soc + x_new, in_hosp = 0;
  std::int64_t home_at_risk = 0, hosp_at_risk = 0;
  for (int t = 0; t < h_.cycles && in_home + in_hosp > 0; ++t) {
    std::int64_t next_home = 0, next_hosp = 0;
    home_at_risk += in_home;
    dist::multinomial(rng, in_home, home, step);
    for (std::size_t k = 0; k < kChemoStates; ++k) home_counts[k] += step[k];
    next_home += step[kHome];
    next_hosp += step[kHospital];
    hosp_at_risk += in_hosp;
    dist::multinomial(rng, in_hosp, hosp, step);
    for (std::size_t k = 0; k < kChemoStates; ++k) hosp_counts[k] += step[k];
    next_home += step[kHome];
    next_hosp += step[kHospital];
    in_home = next_home;
    in_hosp = next_hosp;
  }

  FutureDataset data{{}, design_};
  data.outcomes.push_back({"se_soc", static_cast<double>(x_soc), n_});
  data.outcomes.push_back({"se_new", static_cast<double>(x_new), n_});
  data.outcomes.push_back({"home_at_risk", static_cast<double>(home_at_risk), std::nullopt});
  data.outcomes.push_back({"hosp_at_risk", static_cast<double>(hosp_at_risk), std::nullopt});
  for (std::size_t k = 0; k < kChemoStates; ++k)
    data.outcomes.push_back({row_outcome("home", k), static_cast<double>(home_counts[k]), home_at_risk});
  for (std::size_t k = 0; k < kChemoStates; ++k)
    data.outcomes.push_back({row_outcome("hosp", k), static_cast<double>(hosp_counts[k]), hosp_at_risk});
  return data;
}

double ChemoTrialGenerator::log_likelihood(std::span<const double> phi, const FutureDataset& data) const {
  double ll = dist::binomial_log_pmf(data.count("se_soc"), n_, phi[0]) +
              dist::binomial_log_pmf(data.count("se_new"), n_, phi[1]);
  const auto home = normalised(phi.subspan(2, kChemoStates));
  const auto hosp = normalised(phi.subspan(6, kChemoStates));
  for (std::size_t k = 0; k < kChemoStates; ++k) {
    const auto ch = data.count(row_outcome("home", k));
    const auto cH = data.count(row_outcome("hosp", k));
    if (ch > 0) ll += static_cast<double>(ch) * std::log(home[k]);
    if (cH > 0) ll += static_cast<double>(cH) * std::log(hosp[k]);
  }
  return ll;
}

PosteriorDraws ChemoTrialGenerator::sample_posterior(const FutureDataset& data, std::size_t R, Rng& rng) const {
  const auto soc = beta_binomial_update(h_.side_effect_soc.a, h_.side_effect_soc.b, n_, data.count("se_soc"));
  const auto nov = beta_binomial_update(h_.side_effect_new.a, h_.side_effect_new.b, n_, data.count("se_new"));
  std::array<std::int64_t, kChemoStates> home_counts{}, hosp_counts{};
  for (std::size_t k = 0; k < kChemoStates; ++k) {
    home_counts[k] = data.count(row_outcome("home", k));
    hosp_counts[k] = data.count(row_outcome("hosp", k));
  }
  const auto home_alpha = dirichlet_multinomial_update(h_.home_row, home_counts);
  const auto hosp_alpha = dirichlet_multinomial_update(h_.hospital_row, hosp_counts);

  PosteriorDraws out{Matrix(R, phi_names_.size())};
  for (std::size_t r = 0; r < R; ++r) {
    auto row = out.params.row(r);
    row[0] = dist::beta(rng, soc.alpha, soc.beta);
    row[1] = dist::beta(rng, nov.alpha, nov.beta);
    dist::dirichlet(rng, home_alpha, row.subspan(2, kChemoStates));
    dist::dirichlet(rng, hosp_alpha, row.subspan(6, kChemoStates));
  }
  return out;
}

}  // namespace voi::models
