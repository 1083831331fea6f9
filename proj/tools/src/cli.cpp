#include "voi_cli/cli.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "voi/error.hpp"
#include "voi/evppi.hpp"
#include "voi/mm.hpp"
#include "voi/models/chemo.hpp"
#include "voi/models/flat.hpp"
#include "voi/models/toy.hpp"
#include "voi/oracle.hpp"
#include "voi/psa.hpp"

namespace voi::cli {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> csv_header(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string line;
  if (!in || !std::getline(in, line)) throw Error(ErrorKind::ParseError, "cannot read header of " + path.string());
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> names;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) names.push_back(cell);
  if (!names.empty() && names.back() == "inb") names.pop_back();
  return names;
}

class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
      const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
      if (!known) errors_.push_back("unknown field '" + where + key + "'");
    }
  }

  template <typename T>
  void count(const json& obj, const char* key, const std::string& where, T& target, std::uint64_t min = 0) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      errors_.push_back("field '" + where + key + "' must be a non-negative integer");
      return;
    }
    const auto u = v.get<std::uint64_t>();
    if (u < min) {
      errors_.push_back("field '" + where + key + "' must be at least " + std::to_string(min));
      return;
    }
    target = static_cast<T>(u);
  }

  void integer(const json& obj, const char* key, const std::string& where, std::int64_t& target) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
      errors_.push_back("field '" + where + key + "' must be a non-negative integer");
    else
      target = v.get<std::int64_t>();
  }

  void string(const json& obj, const char* key, const std::string& where, std::string& target) {
    if (!obj.contains(key)) return;
    if (!obj.at(key).is_string())
      errors_.push_back("field '" + where + key + "' must be a string");
    else
      target = obj.at(key).get<std::string>();
  }

  void path(const json& obj, const char* key, const std::string& where, std::optional<std::filesystem::path>& target) {
    std::string s;
    if (!obj.contains(key)) return;
    string(obj, key, where, s);
    if (!s.empty()) target = s;
  }

  void boolean(const json& obj, const char* key, const std::string& where, bool& target) {
    if (!obj.contains(key)) return;
    if (!obj.at(key).is_boolean())
      errors_.push_back("field '" + where + key + "' must be true or false");
    else
      target = obj.at(key).get<bool>();
  }

  void number(const json& obj, const char* key, const std::string& where, double& target) {
    if (!obj.contains(key)) return;
    if (!obj.at(key).is_number())
      errors_.push_back("field '" + where + key + "' must be a number");
    else
      target = obj.at(key).get<double>();
  }

  void counts(const json& obj, const char* key, const std::string& where, std::vector<std::size_t>& target,
              std::uint64_t min) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (!v.is_array() || v.empty()) {
      errors_.push_back("field '" + where + key + "' must be a non-empty array of integers");
      return;
    }
    target.clear();
    for (const auto& e : v) {
      if (!e.is_number_unsigned() || e.get<std::uint64_t>() < min) {
        errors_.push_back("field '" + where + key + "' entries must be integers >= " + std::to_string(min));
        return;
      }
      target.push_back(e.get<std::size_t>());
    }
  }

 private:
  std::vector<std::string>& errors_;
};

const std::vector<std::string> kMethods{"psa", "evppi", "mm", "nested", "oracle", "sweep"};

struct Built {
  std::unique_ptr<EconomicModel> model;
  std::unique_ptr<DataGenerator> gen;
};

models::ChemoHyperparameters chemo_hyperparameters(const RunConfig& c) {
  if (!c.chemo_hyperparameters) return {};
  return models::ChemoHyperparameters::from_json(read_file(*c.chemo_hyperparameters));
}

Built build(const RunConfig& c) {
  Built b;
  if (c.model == "toy") {
    b.model = std::make_unique<models::ToyModel>();
    if (c.design.type == "binomial") b.gen = std::make_unique<models::ToyGenerator>(c.design.n);
  } else if (c.model == "chemo") {
    const auto h = chemo_hyperparameters(c);
    b.model = std::make_unique<models::ChemoModel>(h);
    if (c.design.type == "chemo_trial") b.gen = std::make_unique<models::ChemoTrialGenerator>(h, c.design.n_per_arm);
  }
  if (b.model && c.design.type == "flat") {
    const auto focal = FocalSubset::from_names(c.focal, b.model->parameter_names());
    std::vector<std::string> ordered;
    for (auto i : focal.indices()) ordered.push_back(b.model->parameter_names()[i]);
    b.gen = std::make_unique<models::FlatGenerator>(ordered);
  }
  return b;
}

void validate(RunConfig& c, std::vector<std::string>& errors, bool max_terms_given) {
  if (c.model != "toy" && c.model != "chemo" && c.model != "external") {
    errors.push_back("field 'model' must be one of: toy, chemo, external");
    return;
  }
  if (c.model == "external") {
    if (!c.psa_csv) errors.push_back("model 'external' requires field 'psa_csv'");
    if (c.method != "evppi") errors.push_back("model 'external' supports only the evppi command");
    if (c.focal.empty()) errors.push_back("model 'external' requires field 'focal'");
  }
  if (c.chemo_hyperparameters && c.model != "chemo")
    errors.push_back("field 'chemo_hyperparameters' applies only to model 'chemo'");

  const std::string default_design = c.model == "chemo" ? "chemo_trial" : "binomial";
  if (c.design.type.empty()) c.design.type = default_design;
  if (c.model != "external" && c.design.type != default_design && c.design.type != "flat")
    errors.push_back("field 'design.type' must be '" + default_design + "' or 'flat' for model '" + c.model + "'");

  if (c.focal.empty()) {
    if (c.model == "toy") c.focal = {"pi1"};
    if (c.model == "chemo") c.focal = models::ChemoModel::trial_focal_names();
  }
  if (!max_terms_given && c.model == "chemo") c.max_terms = 10;

  std::vector<std::string> names;
  try {
    if (c.model == "toy") names = models::ToyModel().parameter_names();
    if (c.model == "chemo") names = models::ChemoModel(chemo_hyperparameters(c)).parameter_names();
    if (c.model == "external" && c.psa_csv) names = csv_header(*c.psa_csv);
  } catch (const std::exception& e) {
    errors.push_back(e.what());
    return;
  }
  std::set<std::string> seen;
  bool focal_ok = true;
  for (const auto& f : c.focal) {
    if (std::find(names.begin(), names.end(), f) == names.end()) {
      errors.push_back("unknown focal parameter '" + f + "'; valid choices: " + join(names));
      focal_ok = false;
    }
    if (!seen.insert(f).second) {
      errors.push_back("focal parameter '" + f + "' listed twice");
      focal_ok = false;
    }
  }
  if (!focal_ok || c.model == "external" || !errors.empty()) return;

  const bool needs_study = c.method == "mm" || c.method == "nested" || c.method == "sweep" || c.method == "oracle";
  try {
    const auto built = build(c);
    const auto focal = FocalSubset::from_names(c.focal, built.model->parameter_names());
    built.model->check_focal(focal);
    if (needs_study) check_generator_focal(*built.model, focal, *built.gen);
  } catch (const Error& e) {
    errors.push_back(e.what());
  }
  if (c.method == "oracle" && !(c.model == "toy" && c.design.type == "binomial"))
    errors.push_back("the oracle command needs model 'toy' with design type 'binomial'");
  if (c.method == "sweep") {
    if (c.sweep.Q_values.empty() || c.sweep.budgets.empty())
      errors.push_back("method 'sweep' requires fields 'sweep.Q_values' and 'sweep.budgets'");
    if (c.sweep.oracle.kind == OracleSpec::Kind::Analytic && !(c.model == "toy" && c.design.type == "binomial"))
      errors.push_back("sweep.oracle.kind 'analytic' needs model 'toy' with design type 'binomial'");
  }
}

ojson bundle_json(const VarianceBundle& b) {
  return ojson{{"mu_theta", b.mu_theta},
               {"sigma2_theta", b.sigma2_theta},
               {"sigma2_phi", b.sigma2_phi},
               {"sigma2_x", b.sigma2_x},
               {"sigma2_q", b.sigma2_q}};
}

ojson estimate_json(const EvsiEstimate& e) {
  ojson j;
  j["method"] = std::string(to_string(e.method));
  j["value"] = e.value;
  j["S"] = e.S;
  j["Q"] = e.Q ? ojson(*e.Q) : ojson(nullptr);
  j["R"] = e.R ? ojson(*e.R) : ojson(nullptr);
  j["seed"] = e.seed;
  if (e.bundle) j["variance_bundle"] = bundle_json(*e.bundle);
  if (e.standard_error) j["standard_error"] = *e.standard_error;
  j["warnings"] = e.warnings;
  return j;
}

void emit(const RunConfig& c, const std::string& text, std::ostream& out) {
  if (!c.output) {
    out << text;
    return;
  }
  std::ofstream f(*c.output, std::ios::binary);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + c.output->string());
  f << text;
}

PsaResult obtain_psa(const RunConfig& c, const EconomicModel* model) {
  if (c.psa_csv) {
    auto psa = load_psa_csv(*c.psa_csv);
    if (model && psa.names != model->parameter_names())
      throw Error(ErrorKind::Validation, "PSA file columns do not match model '" + c.model + "': " + join(model->parameter_names()));
    return psa;
  }
  return simulate_psa(*model, c.S, c.seed, c.threads);
}

void write_error(std::ostream& err, std::string_view kind, const std::string& message,
                 std::optional<std::size_t> index = std::nullopt, const std::vector<std::string>& list = {}) {
  ojson j{{"error", kind}, {"message", message}};
  if (index) j["index"] = *index;
  if (!list.empty()) j["errors"] = list;
  err << j.dump() << '\n';
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(errors.empty() ? "invalid config" : errors.front()), errors_(std::move(errors)) {}

std::optional<std::string> method_for_subcommand(const std::string& sub) {
  if (sub == "psa") return "psa";
  if (sub == "evppi") return "evppi";
  if (sub == "evsi-mm") return "mm";
  if (sub == "evsi-nested") return "nested";
  if (sub == "oracle") return "oracle";
  if (sub == "sweep") return "sweep";
  return std::nullopt;
}

RunConfig parse_config_text(const std::string& text, const std::string& method) {
  std::vector<std::string> errors;
  if (std::find(kMethods.begin(), kMethods.end(), method) == kMethods.end())
    throw ConfigError({"unknown method '" + method + "'; valid choices: " + join(kMethods)});

  json j = json::object();
  const bool blank = std::all_of(text.begin(), text.end(), [](unsigned char ch) { return std::isspace(ch); });
  if (!blank) {
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError({std::string("config is not valid JSON: ") + e.what()});
    }
    if (!j.is_object()) throw ConfigError({"config must be a JSON object"});
    if (!j.contains("version"))
      errors.push_back("missing required field 'version' (current version is 1)");
    else if (!j.at("version").is_number_integer() || j.at("version").get<std::int64_t>() != 1)
      errors.push_back("unsupported config version; expected 1");
  }

  RunConfig c;
  c.method = method;
  c.sweep.repetitions = 50;
  Reader r(errors);
  r.check_keys(j, "",
               {"version", "method", "model", "chemo_hyperparameters", "psa_csv", "focal", "design", "S", "Q", "R",
                "seed", "threads", "clamp_variance", "sir_pool_factor", "max_terms", "output", "sweep"});
  if (j.contains("method")) {
    std::string m;
    r.string(j, "method", "", m);
    if (!m.empty() && m != method) errors.push_back("field 'method' is '" + m + "' but the command runs '" + method + "'");
  }
  r.string(j, "model", "", c.model);
  r.path(j, "chemo_hyperparameters", "", c.chemo_hyperparameters);
  r.path(j, "psa_csv", "", c.psa_csv);
  if (j.contains("focal")) {
    const auto& f = j.at("focal");
    if (!f.is_array() || f.empty() || !std::all_of(f.begin(), f.end(), [](const json& e) { return e.is_string(); }))
      errors.push_back("field 'focal' must be a non-empty array of parameter names");
    else
      c.focal = f.get<std::vector<std::string>>();
  }
  if (j.contains("design")) {
    const auto& d = j.at("design");
    if (!d.is_object()) {
      errors.push_back("field 'design' must be an object");
    } else {
      r.check_keys(d, "design.", {"type", "n", "n_per_arm"});
      r.string(d, "type", "design.", c.design.type);
      r.integer(d, "n", "design.", c.design.n);
      r.integer(d, "n_per_arm", "design.", c.design.n_per_arm);
    }
  }
  r.count(j, "S", "", c.S, 2);
  r.count(j, "Q", "", c.Q, 2);
  r.count(j, "R", "", c.R, 2);
  r.count(j, "seed", "", c.seed);
  r.count(j, "threads", "", c.threads);
  r.boolean(j, "clamp_variance", "", c.clamp_variance);
  r.count(j, "sir_pool_factor", "", c.sir_pool_factor, 1);
  r.count(j, "max_terms", "", c.max_terms, 1);
  r.path(j, "output", "", c.output);

  c.sweep.base_seed = c.seed;
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    if (!s.is_object()) {
      errors.push_back("field 'sweep' must be an object");
    } else {
      r.check_keys(s, "sweep.", {"Q_values", "budgets", "repetitions", "base_seed", "summary_csv", "oracle"});
      r.counts(s, "Q_values", "sweep.", c.sweep.Q_values, 2);
      r.counts(s, "budgets", "sweep.", c.sweep.budgets, 4);
      r.count(s, "repetitions", "sweep.", c.sweep.repetitions, 2);
      r.count(s, "base_seed", "sweep.", c.sweep.base_seed);
      r.path(s, "summary_csv", "sweep.", c.summary_csv);
      if (s.contains("oracle")) {
        const auto& o = s.at("oracle");
        if (!o.is_object()) {
          errors.push_back("field 'sweep.oracle' must be an object");
        } else {
          r.check_keys(o, "sweep.oracle.", {"kind", "S", "R", "seed", "cache", "value"});
          std::string kind = "analytic";
          r.string(o, "kind", "sweep.oracle.", kind);
          if (kind == "analytic") {
            c.sweep.oracle.kind = OracleSpec::Kind::Analytic;
          } else if (kind == "nested_mc") {
            c.sweep.oracle.kind = OracleSpec::Kind::NestedMc;
            c.sweep.oracle.S = 2000;
            c.sweep.oracle.R = 2000;
          } else if (kind == "fixed") {
            c.sweep.oracle.kind = OracleSpec::Kind::Fixed;
            if (!o.contains("value")) errors.push_back("sweep.oracle.kind 'fixed' requires field 'sweep.oracle.value'");
          } else {
            errors.push_back("field 'sweep.oracle.kind' must be one of: analytic, nested_mc, fixed");
          }
          r.count(o, "S", "sweep.oracle.", c.sweep.oracle.S, 2);
          r.count(o, "R", "sweep.oracle.", c.sweep.oracle.R, 2);
          r.count(o, "seed", "sweep.oracle.", c.sweep.oracle.seed);
          r.path(o, "cache", "sweep.oracle.", c.sweep.oracle.cache);
          r.number(o, "value", "sweep.oracle.", c.sweep.oracle.value);
        }
      }
    }
  }
  c.sweep.clamp_variance = c.clamp_variance;
  c.sweep.threads = c.threads;
  c.sweep.sir_pool_factor = c.sir_pool_factor;

  validate(c, errors, j.contains("max_terms"));
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

RunConfig parse_config(const std::filesystem::path& path, const std::string& method) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw ConfigError({e.what()});
  }
  if (std::all_of(text.begin(), text.end(), [](unsigned char ch) { return std::isspace(ch); }))
    throw ConfigError({"config file " + path.string() + " is empty"});
  return parse_config_text(text, method);
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  try {
    const auto built = build(c);
    std::optional<FocalSubset> focal;
    if (built.model) focal = FocalSubset::from_names(c.focal, built.model->parameter_names());
    RegressionConfig reg;
    reg.max_terms = c.max_terms;

    if (c.method == "psa") {
      const auto psa = obtain_psa(c, built.model.get());
      if (c.output)
        save_psa_csv(psa, *c.output);
      else
        write_psa_csv(psa, out);
      return kExitOk;
    }

    if (c.method == "evppi") {
      const auto psa = obtain_psa(c, built.model.get());
      const auto f = focal ? *focal : FocalSubset::from_names(c.focal, psa.names);
      const auto cinb = fit_conditional_inb(psa, f, reg);
      const auto m = inb_moments(psa);
      ojson j;
      j["method"] = "evppi";
      j["value"] = evppi(cinb, m.mu_theta);
      j["S"] = psa.size();
      j["seed"] = c.psa_csv ? ojson(nullptr) : ojson(c.seed);
      j["mu_theta"] = m.mu_theta;
      j["sigma2_theta"] = m.sigma2_theta;
      j["sigma2_phi"] = cinb.sigma2_phi;
      j["lambda"] = cinb.lambda;
      j["effective_df"] = cinb.effective_df;
      j["warnings"] = std::vector<std::string>{};
      j["runtime_s"] = elapsed();
      emit(c, j.dump(2) + "\n", out);
      return kExitOk;
    }

    if (c.method == "mm") {
      const auto psa = obtain_psa(c, built.model.get());
      const auto cinb = fit_conditional_inb(psa, *focal, reg);
      MmConfig mm;
      mm.Q = c.Q;
      mm.R = c.R;
      mm.seed = c.seed;
      mm.threads = c.threads;
      mm.clamp_variance = c.clamp_variance;
      mm.sir_pool_factor = c.sir_pool_factor;
      auto j = estimate_json(evsi_moment_matching(*built.model, psa, cinb, *built.gen, mm));
      j["runtime_s"] = elapsed();
      emit(c, j.dump(2) + "\n", out);
      return kExitOk;
    }

    if (c.method == "nested") {
      NestedConfig nc;
      nc.S = c.S;
      nc.R = c.R;
      nc.seed = c.seed;
      nc.threads = c.threads;
      nc.sir_pool_factor = c.sir_pool_factor;
      auto j = estimate_json(evsi_nested_mc(*built.model, *built.gen, *focal, nc));
      j["runtime_s"] = elapsed();
      emit(c, j.dump(2) + "\n", out);
      return kExitOk;
    }

    if (c.method == "oracle") {
      ojson j;
      j["method"] = "analytic";
      j["value"] = toy_evsi_analytic(c.design.n);
      j["S"] = nullptr;
      j["Q"] = nullptr;
      j["R"] = nullptr;
      j["seed"] = nullptr;
      j["n"] = c.design.n;
      j["warnings"] = std::vector<std::string>{};
      j["runtime_s"] = elapsed();
      emit(c, j.dump(2) + "\n", out);
      return kExitOk;
    }

    const auto psa = obtain_psa(c, built.model.get());
    const auto cinb = fit_conditional_inb(psa, *focal, reg);
    const auto res = run_sweep(*built.model, *built.gen, psa, cinb, c.sweep);
    if (c.summary_csv) {
      std::ofstream f(*c.summary_csv, std::ios::binary);
      if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + c.summary_csv->string());
      f << summarize_sweep(res);
    }
    ojson j;
    j["method"] = "sweep";
    j["oracle"] = res.oracle;
    j["S"] = psa.size();
    j["seed"] = c.sweep.base_seed;
    j["repetitions"] = c.sweep.repetitions;
    j["cells"] = ojson::array();
    for (const auto& cell : res.cells)
      j["cells"].push_back(ojson{{"Q", cell.Q},
                                 {"budget", cell.budget},
                                 {"R", cell.R},
                                 {"variance", cell.variance},
                                 {"bias", cell.bias},
                                 {"mean_runtime_s", cell.mean_runtime_s},
                                 {"estimates", cell.estimates}});
    j["warnings"] = res.warnings;
    j["runtime_s"] = elapsed();
    emit(c, j.dump(2) + "\n", out);
    return kExitOk;
  } catch (const Error& e) {
    write_error(err, to_string(e.kind()), e.what(), e.index());
    return e.kind() == ErrorKind::Validation ? kExitValidation : kExitRuntime;
  } catch (const std::exception& e) {
    write_error(err, "Internal", e.what());
    return kExitRuntime;
  }
}

}  // namespace voi::cli
