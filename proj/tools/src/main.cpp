#include <iostream>

#include "CLI11.hpp"

#include "qkinetic_cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace qkinetic::cli;
  CLI::App app{"qkinetic: modified quantum Boltzmann solver and bound verifier"};
  app.require_subcommand(1);
  app.set_version_flag("--version", QKINETIC_VERSION);

  CommandOptions options;
  unsigned threads = 0;
  std::uint64_t seed = 0;
  std::size_t kernel_cache = 0;
  std::string axis;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", options.config, "JSON configuration file")->required();
    sub->add_option("--out-dir", options.out_dir, "output directory")->capture_default_str();
    sub->add_option("--threads", threads, "worker threads (default: QKINETIC_THREADS, else hardware)");
    sub->add_option("--seed", seed, "RNG seed (overrides the configuration)");
    sub->add_flag("--conservative-fix", options.conservative_fix, "project collision output onto {1, v, |v|^2}^perp");
    sub->add_flag("--snapshots", options.snapshots, "write a field snapshot per window");
    sub->add_option("--kernel-cache", kernel_cache, "collision table cache limit in bytes");
  };
  CLI::App* run = app.add_subcommand("run", "march the configured initial datum in time");
  CLI::App* verify = app.add_subcommand("verify", "run the numerical bound checks");
  CLI::App* sweep = app.add_subcommand("sweep", "repeat a run over one parameter axis");
  add_common(run);
  add_common(verify);
  add_common(sweep);
  sweep->add_option("--axis", axis, "delta, rho, gamma or resolution (overrides the configuration)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  for (CLI::App* sub : {run, verify, sweep}) {
    if (sub->count("--threads")) options.threads = threads;
    if (sub->count("--seed")) options.seed = seed;
    if (sub->count("--kernel-cache")) options.kernel_cache_bytes = kernel_cache;
  }
  if (sweep->parsed() && sweep->count("--axis")) options.sweep_axis = axis;

  try {
    if (run->parsed()) return cmd_run(options, std::cerr);
    if (verify->parsed()) return cmd_verify(options, std::cerr);
    return cmd_sweep(options, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
