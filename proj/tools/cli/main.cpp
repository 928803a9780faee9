#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "obtune/session.hpp"

namespace {

struct CommonArgs {
  std::string config;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

void attach_common(CLI::App& cmd, CommonArgs& args, bool with_overrides) {
  cmd.add_option("-c,--config", args.config, "session config (JSON)")
      ->required();
  if (with_overrides) {
    cmd.add_option("-o,--out", args.out_dir,
                   "output directory (overrides the config)");
    cmd.add_option("-s,--seed", args.seed, "session seed (overrides the config)");
    cmd.add_flag("-q,--quiet", args.quiet, "suppress the summary");
  }
}

obtune::SessionOverrides overrides_of(const CommonArgs& args) {
  obtune::SessionOverrides ov;
  ov.out_dir = args.out_dir;
  ov.seed = args.seed;
  return ov;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"observer-assisted hyper-parameter tuning"};
  app.require_subcommand(1);

  CommonArgs run_args;
  CLI::App* run = app.add_subcommand("run", "bootstrap, fit, tune, verify");
  attach_common(*run, run_args, true);

  CommonArgs compare_args;
  CLI::App* compare = app.add_subcommand(
      "compare", "observer vs random and grid search at equal budget");
  attach_common(*compare, compare_args, true);

  CommonArgs validate_args;
  CLI::App* validate =
      app.add_subcommand("validate", "check a config without running it");
  attach_common(*validate, validate_args, false);

  std::string trajectory_path;
  bool inspect_quiet = false;
  CLI::App* inspect =
      app.add_subcommand("inspect", "replay and pretty-print a trajectory log");
  inspect->add_option("-t,--trajectory", trajectory_path, "trajectory log")
      ->required();
  inspect->add_flag("-q,--quiet", inspect_quiet, "only report consistency");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed())
    return obtune::run_session(run_args.config, overrides_of(run_args),
                               run_args.quiet, std::cout, std::cerr);
  if (compare->parsed())
    return obtune::run_compare(compare_args.config, overrides_of(compare_args),
                               compare_args.quiet, std::cout, std::cerr);
  if (validate->parsed())
    return obtune::validate_config(validate_args.config, std::cout, std::cerr);
  if (inspect->parsed())
    return obtune::inspect_trajectory(trajectory_path, inspect_quiet,
                                      std::cout, std::cerr);
  return obtune::kExitUnexpected;
}
