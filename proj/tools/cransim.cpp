#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "cran/experiments.hpp"
#include "cran/rng.hpp"

namespace {

using namespace cran;

struct CommonOpts {
  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int realizations = 0;  // 0 keeps the config value
  std::string ac = "on";
  std::string delay_mode = "dynamic";
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "JSON configuration file");
  cmd->add_option("--out", o.out_path, "output path (default: stdout)");
  cmd->add_option("--seed", o.seed, "base RNG seed")
      ->each([&o](const std::string&) { o.seed_given = true; });
  cmd->add_option("--realizations", o.realizations,
                  "Monte Carlo realizations per sweep point")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--ac", o.ac, "admission control on|off")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--delay-mode", o.delay_mode,
                  "delay split: dynamic or fixed thirds")
      ->check(CLI::IsMember({"dynamic", "fixed"}));
}

ExperimentConfig resolve_config(const CommonOpts& o) {
  ExperimentConfig ec;
  if (!o.config_path.empty()) ec = load_experiment_config(o.config_path);
  if (const char* env = std::getenv("CRANSIM_SEED")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0') ec.seed = v;
  }
  if (o.seed_given) ec.seed = o.seed;
  if (o.realizations > 0) ec.realizations = o.realizations;
  return ec;
}

RunConfig resolve_run_config(const CommonOpts& o) {
  RunConfig rc;
  rc.ac_enabled = o.ac == "on";
  rc.delay_mode =
      o.delay_mode == "fixed" ? DelayMode::kFixed : DelayMode::kDynamic;
  return rc;
}

void emit(const CommonOpts& o, const std::string& text) {
  if (o.out_path.empty())
    std::cout << text;
  else
    write_file(o.out_path, text);
}

const char* status_name(RunStatus s) {
  switch (s) {
    case RunStatus::kConverged:
      return "converged";
    case RunStatus::kIterLimit:
      return "iteration_limit";
    default:
      return "no_users_left";
  }
}

int cmd_run(const CommonOpts& o) {
  ExperimentConfig ec = resolve_config(o);
  RunConfig rc = resolve_run_config(o);
  Scenario sc = generate_scenario(ec.scenario, mix_seed(ec.seed, 0));
  ChannelRealization ch = draw_channels(sc, mix_seed(ec.seed, 1));
  RunResult res = run_algorithm1(sc, ch, rc);

  nlohmann::json j;
  j["status"] = status_name(res.status);
  j["users_total"] = static_cast<int>(res.admitted.size());
  j["users_admitted"] = res.n_admitted();
  j["rejected_order"] = res.rejected;
  j["total_power_w"] = res.total_power_w;
  j["total_power_dbm"] = res.total_power_dbm;
  j["outer_iterations"] = res.outer_iters;
  j["total_outer_iterations"] = res.total_outer_iters;
  j["feasible"] = res.feasible;
  j["worst_residual"] = res.residuals.worst;
  j["max_deficit_bps"] = res.max_alpha;
  emit(o, j.dump(2) + "\n");
  return 0;
}

int cmd_sweep(const CommonOpts& o, const std::string& name) {
  ExperimentConfig ec = resolve_config(o);
  RunConfig rc = resolve_run_config(o);
  std::string text;
  if (name == "convergence")
    text = convergence_trace_csv(ec.scenario, rc, ec.seed);
  else
    text = sweep_csv(make_sweep(name, ec.scenario, rc), ec.realizations,
                     ec.seed);
  emit(o, text);
  return 0;
}

int cmd_validate(const CommonOpts& o) {
  ExperimentConfig ec = resolve_config(o);
  Scenario sc = generate_scenario(ec.scenario, 1);
  auto problems = sc.validate();
  if (!problems.empty()) {
    for (const auto& p : problems) std::cerr << p << "\n";
    return 1;
  }
  std::cout << "ok\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"C-RAN access/fronthaul resource allocation simulator"};
  app.require_subcommand(1);

  CommonOpts run_o, sweep_o, val_o;
  CLI::App* run = app.add_subcommand("run", "solve one seeded instance");
  add_common(run, run_o);

  CLI::App* sweep = app.add_subcommand("sweep", "figure-reproduction sweeps");
  std::string sweep_name;
  sweep
      ->add_option("name", sweep_name,
                   "users|rrsv|per|delay|baseline-compare|convergence")
      ->required()
      ->check(CLI::IsMember({"users", "rrsv", "per", "delay",
                             "baseline-compare", "convergence"}));
  add_common(sweep, sweep_o);

  CLI::App* val =
      app.add_subcommand("validate-config", "check a configuration file");
  add_common(val, val_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return cmd_run(run_o);
    if (sweep->parsed()) return cmd_sweep(sweep_o, sweep_name);
    if (val->parsed()) return cmd_validate(val_o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
