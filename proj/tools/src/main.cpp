#include <CLI11.hpp>
#include <iostream>
#include <nlohmann/json.hpp>

#include "voi_cli/cli.hpp"

namespace {

struct Command {
  const char* name;
  const char* help;
};

constexpr Command kCommands[] = {
    {"psa", "Run the probabilistic sensitivity analysis and write the PSA as CSV"},
    {"evppi", "Estimate the EVPPI of the focal parameters by penalised regression"},
    {"evsi-mm", "Moment-matching EVSI. Pick Q as (total posterior simulations) / R; Q < 30 is flagged"},
    {"evsi-nested", "Gold-standard nested Monte Carlo EVSI (S x R simulations)"},
    {"oracle", "Exact EVSI of the toy model's binomial trial"},
    {"sweep", "Repeat moment-matching EVSI over a grid of Q values and simulation budgets"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Value of information: EVPPI and moment-matching EVSI for health economic models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "voi 0.1.0");

  std::string config_path;
  std::uint64_t seed = 0;
  std::string output;
  std::vector<CLI::App*> subs;
  for (const auto& cmd : kCommands) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("--config", config_path, "JSON run configuration (version 1)")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Override the configured seed");
    sub->add_option("--output", output, "Write the result here instead of stdout");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? voi::cli::kExitOk : voi::cli::kExitValidation;
  }

  std::string subcommand;
  for (auto* sub : subs)
    if (sub->parsed()) subcommand = sub->get_name();
  const auto method = *voi::cli::method_for_subcommand(subcommand);

  voi::cli::RunConfig config;
  try {
    config = config_path.empty() ? voi::cli::parse_config_text("", method) : voi::cli::parse_config(config_path, method);
  } catch (const voi::cli::ConfigError& e) {
    nlohmann::ordered_json j{{"error", "Validation"}, {"message", e.what()}, {"errors", e.errors()}};
    std::cerr << j.dump() << '\n';
    return voi::cli::kExitValidation;
  }
  for (auto* sub : subs) {
    if (!sub->parsed()) continue;
    if (sub->count("--seed") > 0) {
      config.seed = seed;
      config.sweep.base_seed = seed;
    }
    if (sub->count("--output") > 0) config.output = output;
  }
  return voi::cli::run(config, std::cout, std::cerr);
}
