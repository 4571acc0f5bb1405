#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "iocforge/errors.hpp"

namespace {

using iocforge::cli::CliOverrides;
using iocforge::cli::RunConfig;

struct CommonArgs {
  std::optional<std::string> config_path;
  CliOverrides overrides;
};

void add_common_options(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON configuration file");
  cmd->add_option("--seed", args.overrides.seed, "master seed override");
  cmd->add_option("--out", args.overrides.output_dir, "output directory override");
  cmd->add_option("--jobs", args.overrides.jobs, "worker threads for sweeps");
  cmd->add_option("--T", args.overrides.T, "offline trajectory length override");
  cmd->add_option("--T-ini", args.overrides.T_ini, "initial window length override");
  cmd->add_option("--N", args.overrides.N, "control horizon override");
  cmd->add_option("--snr", args.overrides.snr_db, "observation noise SNR in dB");
  cmd->add_option("--label", args.overrides.label, "artifact file label override");
}

RunConfig resolve(const CommonArgs& args) {
  std::optional<std::filesystem::path> path;
  if (args.config_path) path = *args.config_path;
  return iocforge::cli::parse_config(path, args.overrides);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ioc-forge: data-driven LQ weight recovery from input-output trajectories"};
  app.require_subcommand(1);

  CommonArgs simulate_args;
  auto* simulate = app.add_subcommand("simulate", "generate the offline excitation trajectory");
  add_common_options(simulate, simulate_args);

  CommonArgs forward_args;
  std::string forward_method = "oracle";
  auto* forward = app.add_subcommand("forward", "solve the forward LQ problem");
  add_common_options(forward, forward_args);
  forward->add_option("--method", forward_method, "oracle|data-enabled");

  CommonArgs invert_args;
  bool invert_noisy = false;
  std::optional<std::string> invert_data, invert_optimal;
  auto* invert = app.add_subcommand("invert", "recover the objective weights from trajectories");
  add_common_options(invert, invert_args);
  invert->add_option("--solver", invert_args.overrides.solver, "vanilla|simplified|both");
  invert->add_flag("--noisy", invert_noisy, "use the Rayleigh-quotient estimators");
  invert->add_option("--data", invert_data, "offline trajectory CSV (generated when absent)");
  invert->add_option("--optimal", invert_optimal, "optimal trajectory CSV (generated when absent)");

  CommonArgs check_args;
  std::string check_mode = "vanilla";
  auto* check = app.add_subcommand("check-id", "run an identifiability test");
  add_common_options(check, check_args);
  check->add_option("--mode", check_mode, "vanilla|simplified|horizon");

  CommonArgs tini_args;
  auto* sweep_tini = app.add_subcommand("sweep-tini", "error sweep over the initial window length");
  add_common_options(sweep_tini, tini_args);
  sweep_tini->add_option("--trials", tini_args.overrides.trials, "trials per T_ini");
  sweep_tini->add_option("--solver", tini_args.overrides.solver, "vanilla|simplified|both");

  CommonArgs noise_args;
  auto* sweep_noise = app.add_subcommand("sweep-noise", "error sweep over the observation SNR");
  add_common_options(sweep_noise, noise_args);
  sweep_noise->add_option("--trials", noise_args.overrides.trials, "trials per SNR level");
  sweep_noise->add_option("--solver", noise_args.overrides.solver, "vanilla|simplified|both");

  CommonArgs bench_args;
  auto* bench = app.add_subcommand("bench", "solver timing comparison across T_ini");
  add_common_options(bench, bench_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ExtrasError& e) {
    std::fprintf(stderr, "%s\n\n%s\n", e.what(), app.help().c_str());
    return iocforge::cli::kExitUsage;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (simulate->parsed()) return iocforge::cli::cmd_simulate(resolve(simulate_args));
    if (forward->parsed()) return iocforge::cli::cmd_forward(resolve(forward_args), forward_method);
    if (invert->parsed()) {
      std::optional<std::filesystem::path> data, optimal;
      if (invert_data) data = *invert_data;
      if (invert_optimal) optimal = *invert_optimal;
      return iocforge::cli::cmd_invert(resolve(invert_args), invert_noisy, data, optimal);
    }
    if (check->parsed()) return iocforge::cli::cmd_check_id(resolve(check_args), check_mode);
    if (sweep_tini->parsed()) return iocforge::cli::cmd_sweep_tini(resolve(tini_args));
    if (sweep_noise->parsed()) return iocforge::cli::cmd_sweep_noise(resolve(noise_args));
    if (bench->parsed()) return iocforge::cli::cmd_bench(resolve(bench_args));
  } catch (const iocforge::UnidentifiableError& e) {
    std::fprintf(stderr, "unidentifiable: %s\n", e.what());
    return iocforge::cli::kExitUnidentifiable;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return iocforge::cli::kExitError;
  }
  return iocforge::cli::kExitError;
}
