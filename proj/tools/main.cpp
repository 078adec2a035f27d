// Command-line front end for the slithers state planner: run path-following
// experiments, validate robot description files, and recompute metric
// reports from stored traces.

#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "slithers/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"slithers - whole-body state planner for mobile manipulators"};
  app.require_subcommand(1);

  slithers::RunManifest manifest;
  std::vector<double> lambda_v;
  double dt = 0.0, duration = 0.0, lambda_e = 0.0, lambda_j = 0.0;
  int max_iters = 0;

  auto* run = app.add_subcommand("run", "plan and simulate a path run");
  run->add_option("--robot", manifest.robot_file, "robot description JSON");
  run->add_option("--path", manifest.path_file, "path config JSON");
  run->add_option("--out", manifest.output_directory, "output directory")
      ->capture_default_str();
  run->add_flag("--all", manifest.all,
                "run both bundled robots on all three bundled paths");
  run->add_option("--jobs", manifest.jobs, "parallel runs for --all")
      ->capture_default_str();
  run->add_option("--data-dir", manifest.data_dir,
                  "bundled asset directory (default: SLITHERS_DATA_DIR or "
                  "built-in)");
  auto* opt_dt = run->add_option("--dt", dt, "time step override (s)");
  auto* opt_dur = run->add_option("--duration", duration,
                                  "path duration override (s)");
  auto* opt_le = run->add_option("--lambda-e", lambda_e, "pose error weight");
  auto* opt_lj = run->add_option("--lambda-j", lambda_j, "jerk weight");
  auto* opt_lv = run->add_option("--lambda-v", lambda_v,
                                 "per-channel motion weights (comma list)")
                     ->delimiter(',');
  auto* opt_mi = run->add_option("--max-iters", max_iters,
                                 "solver iteration cap per step");

  std::string validate_file;
  auto* validate =
      app.add_subcommand("validate", "check a robot description file");
  validate->add_option("file", validate_file, "robot description JSON")
      ->required();

  std::string trace_file;
  int base_channels = 0;
  bool differenced = false;
  auto* report =
      app.add_subcommand("report", "recompute metrics from a stored trace");
  report->add_option("trace", trace_file, "trace.csv path")->required();
  auto* opt_bc = report->add_option(
      "--base-channels", base_channels,
      "base command channels in the trace (default: inferred)");
  report->add_flag("--differenced", differenced,
                   "base maxima from differenced poses instead of commands");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    if (!manifest.all
        && (manifest.robot_file.empty() || manifest.path_file.empty())) {
      std::cerr << "error: run needs --robot and --path (or --all)\n";
      return slithers::kExitParseError;
    }
    if (*opt_dt) manifest.overrides.dt = dt;
    if (*opt_dur) manifest.overrides.duration = duration;
    if (*opt_le) manifest.overrides.lambda_e = lambda_e;
    if (*opt_lj) manifest.overrides.lambda_j = lambda_j;
    if (*opt_lv) manifest.overrides.lambda_v = lambda_v;
    if (*opt_mi) manifest.overrides.max_iterations = max_iters;
    return slithers::cmdRun(manifest);
  }
  if (validate->parsed()) {
    return slithers::cmdValidate(validate_file);
  }
  std::optional<int> bc;
  if (*opt_bc) bc = base_channels;
  return slithers::cmdReport(trace_file, bc, differenced);
}
