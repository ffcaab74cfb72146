#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "qmmw/version.hpp"

namespace {

void add_run_flags(CLI::App* app, qmmw::cli::RunConfig& c) {
  app->add_option("--game", c.game, "builtin fixture name or game spec path")->capture_default_str();
  app->add_option("--algo", c.algo, "mmw, 3mw-2pe or 3mw-1pe")->capture_default_str();
  app->add_option("--schedule", c.schedule, "theorem, constant:g[,d] or power:g0,p,d0,q")->capture_default_str();
  app->add_option("--T", c.horizon, "horizon")->capture_default_str();
  app->add_option("--seeds", c.seeds, "number of seeds")->capture_default_str();
  app->add_option("--base-seed", c.base_seed, "base seed for stream derivation")->capture_default_str();
  app->add_option("--out", c.out, "output directory")->capture_default_str();
  app->add_option("--stride", c.stride, "record every stride steps (0: log grid)")->capture_default_str();
  app->add_option("--reference", c.reference, "Bregman reference: auto, equilibrium, uniform, none")
      ->capture_default_str();
  app->add_option("--threads", c.threads, "worker threads (0: all cores)")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace qmmw::cli;
  CLI::App app{"Matrix multiplicative weights learning in quantum games"};
  app.set_version_flag("--version", std::string(qmmw::kVersion));
  app.require_subcommand(1);

  std::string validate_game = "matching-pennies";
  auto* validate = app.add_subcommand("validate", "check a game spec");
  validate->add_option("--game", validate_game, "builtin fixture name or game spec path")->capture_default_str();

  RunConfig run;
  std::string manifest;
  auto* run_cmd = app.add_subcommand("run", "run learners and write per-seed and summary CSVs");
  add_run_flags(run_cmd, run);
  run_cmd->add_option("--manifest", manifest, "replay a manifest.json (other run flags except --out are ignored)");

  EstimatorStatsConfig stats;
  std::string stats_out;
  auto* stats_cmd = app.add_subcommand("estimator-stats", "Monte-Carlo moments of a gradient estimator");
  stats_cmd->add_option("--game", stats.game)->capture_default_str();
  stats_cmd->add_option("--algo", stats.algo, "3mw-2pe or 3mw-1pe")->capture_default_str();
  stats_cmd->add_option("--deltas", stats.deltas, "sampling radii")->delimiter(',');
  stats_cmd->add_option("--n", stats.samples, "samples per radius")->capture_default_str();
  stats_cmd->add_option("--base-seed", stats.seed)->capture_default_str();
  stats_cmd->add_option("--profile", stats.profile, "uniform or equilibrium")->capture_default_str();
  stats_cmd->add_option("--out", stats_out, "CSV path (stdout when omitted)");

  VsConfig vs;
  vs.run.game = "dominant";
  vs.run.algo = "3mw-1pe";
  vs.run.schedule = "power:0.2,0.9,0.6,0.2";
  vs.run.horizon = 100000;
  vs.run.seeds = 50;
  auto* vs_cmd = app.add_subcommand("vs", "last-iterate run against an equilibrium candidate");
  add_run_flags(vs_cmd, vs.run);
  vs_cmd->add_option("--threshold", vs.threshold, "success threshold on the final divergence")->capture_default_str();
  vs_cmd->add_option("--radius", vs.radius, "certificate sampling radius")->capture_default_str();
  vs_cmd->add_option("--certificate-samples", vs.certificate_samples)->capture_default_str();
  vs_cmd->add_flag("--write", vs.write_files, "also write CSVs and a manifest to --out");

  std::string report_dir = "qmmw-out";
  auto* report = app.add_subcommand("report", "summarize an output directory");
  report->add_option("--out", report_dir, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  if (*validate) return cmd_validate(validate_game, std::cout, std::cerr);
  if (*run_cmd) {
    if (!manifest.empty()) return cmd_run_manifest(manifest, run.out, run.threads, std::cout, std::cerr);
    return cmd_run(run, std::cout, std::cerr);
  }
  if (*stats_cmd) {
    if (!stats_out.empty()) stats.out = stats_out;
    return cmd_estimator_stats(stats, std::cout, std::cerr);
  }
  if (*vs_cmd) return cmd_vs(vs, std::cout, std::cerr);
  return cmd_report(report_dir, std::cout, std::cerr);
}
