#pragma once

// Command implementations behind the CLI front end: run experiments, validate
// robot description files, recompute reports from stored traces.
//
// Exit codes: 0 success, 2 file/parse errors, 3 dimension mismatches.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "slithers/io.hpp"
#include "slithers/metrics.hpp"
#include "slithers/paths.hpp"
#include "slithers/planner.hpp"
#include "slithers/simulator.hpp"

namespace slithers {

inline constexpr int kExitOk = 0;
inline constexpr int kExitParseError = 2;
inline constexpr int kExitDimensionError = 3;

// Unset optionals fall through to path/robot file values, then to built-in
// defaults.
struct ConfigOverrides {
  std::optional<double> dt;
  std::optional<double> duration;
  std::optional<double> lambda_e;
  std::optional<double> lambda_j;
  std::optional<std::vector<double>> lambda_v;
  std::optional<int> max_iterations;
};

struct RunManifest {
  std::string robot_file;
  std::string path_file;
  std::string output_directory = "results";
  ConfigOverrides overrides;
  bool all = false;        // run the full 2-base x 3-path bundle
  int jobs = 1;            // parallel runs for --all
  std::string data_dir;    // bundled asset directory (for --all)
};

// Bundled asset directory: SLITHERS_DATA_DIR env var wins, then the
// compile-time default.
inline std::string defaultDataDir() {
  if (const char* env = std::getenv("SLITHERS_DATA_DIR")) {
    return env;
  }
#ifdef SLITHERS_BUNDLED_DATA_DIR
  return SLITHERS_BUNDLED_DATA_DIR;
#else
  return "data";
#endif
}

namespace detail {

struct PreparedRun {
  RobotModel robot;
  DesiredPath path;
  PlannerConfig config;
  std::filesystem::path out_dir;
};

inline PreparedRun prepareRun(const std::string& robot_file,
                              const std::string& path_file,
                              const std::filesystem::path& out_root,
                              const ConfigOverrides& ov) {
  PreparedRun run;
  run.robot = loadRobot(robot_file);
  PathParams params = loadPathParams(path_file);

  // Precedence: command line > file values > built-in defaults.
  const double dt = ov.dt.value_or(params.dt);
  const double duration = ov.duration.value_or(params.duration);
  run.path = sample(params, dt, duration);

  run.config = PlannerConfig::defaultsFor(run.robot);
  run.config.dt = dt;
  if (ov.lambda_e) run.config.lambda_e = *ov.lambda_e;
  if (ov.lambda_j) run.config.lambda_j = *ov.lambda_j;
  if (ov.max_iterations) run.config.max_iterations = *ov.max_iterations;
  if (ov.lambda_v) {
    run.config.lambda_v = Eigen::Map<const Eigen::VectorXd>(
        ov.lambda_v->data(), ov.lambda_v->size());
  }
  run.config.validate(run.robot);  // throws DimensionError on mismatch

  run.out_dir = out_root
                / (std::filesystem::path(robot_file).stem().string() + "__"
                   + std::filesystem::path(path_file).stem().string());
  return run;
}

// Executes one prepared run and writes trace.csv, report.json, report.txt.
// The report is recomputed from the written CSV so that `report trace.csv`
// reproduces it byte for byte.
inline void executeRun(const PreparedRun& run) {
  const PlannerState initial =
      PlannerState::initial(run.robot, run.robot.initial_joint_values);

  const double spacing = maxConsecutiveSpacing(run.path);
  const double reachable_per_step =
      run.robot.base.velocity_limits[0].second * run.path.dt + 0.5;
  if (spacing > reachable_per_step) {
    std::cerr << "warning: consecutive waypoints up to " << spacing
              << " m apart; platform covers about " << reachable_per_step
              << " m per step\n";
  }

  const ExperimentResult result =
      slithers::run(run.robot, run.path, run.config, initial);

  std::filesystem::create_directories(run.out_dir);
  const auto trace_path = run.out_dir / "trace.csv";
  {
    std::ofstream out(trace_path);
    writeTraceCsv(out, result.trace);
  }

  std::ifstream in(trace_path);
  const ParsedTrace parsed =
      readTraceCsv(in, run.robot.base.channels());
  const MetricsReport report =
      computeMetrics(parsed.records, parsed.base_channels, run.config.dt);
  {
    std::ofstream out(run.out_dir / "report.json");
    out << reportToJson(report).dump(2) << "\n";
  }
  {
    std::ofstream out(run.out_dir / "report.txt");
    out << renderReportText(report);
  }
}

}  // namespace detail

inline int cmdRun(const RunManifest& manifest) {
  try {
    std::vector<std::pair<std::string, std::string>> combos;
    if (manifest.all) {
      const std::filesystem::path data =
          manifest.data_dir.empty() ? defaultDataDir() : manifest.data_dir;
      for (const char* robot : {"ur5e_husky.json", "ur5e_xdrive.json"}) {
        for (const char* path :
             {"vertical_helix.json", "sine_wave.json", "horizontal_helix.json"}) {
          combos.emplace_back((data / robot).string(), (data / path).string());
        }
      }
    } else {
      combos.emplace_back(manifest.robot_file, manifest.path_file);
    }

    // Everything is loaded and validated before any run starts.
    std::vector<detail::PreparedRun> runs;
    runs.reserve(combos.size());
    for (const auto& [robot_file, path_file] : combos) {
      runs.push_back(detail::prepareRun(robot_file, path_file,
                                        manifest.output_directory,
                                        manifest.overrides));
    }

    const int jobs = std::max(1, manifest.jobs);
    if (jobs == 1 || runs.size() == 1) {
      for (const auto& run : runs) detail::executeRun(run);
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::thread> workers;
      const int n = std::min<int>(jobs, static_cast<int>(runs.size()));
      for (int w = 0; w < n; ++w) {
        workers.emplace_back([&] {
          for (std::size_t i = next.fetch_add(1); i < runs.size();
               i = next.fetch_add(1)) {
            detail::executeRun(runs[i]);
          }
        });
      }
      for (auto& t : workers) t.join();
    }

    for (const auto& run : runs) {
      std::cout << "wrote " << (run.out_dir / "trace.csv").string() << "\n";
    }
    return kExitOk;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDimensionError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParseError;
  }
}

inline int cmdValidate(const std::string& robot_file) {
  RobotModel m;
  try {
    m = loadRobot(robot_file);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParseError;
  }
  const auto items = validateRobot(m);
  bool all_ok = true;
  for (const auto& item : items) {
    std::cout << (item.passed ? "  ok   " : "  FAIL ") << item.label;
    if (!item.detail.empty()) std::cout << " (" << item.detail << ")";
    std::cout << "\n";
    all_ok = all_ok && item.passed;
  }
  std::cout << (all_ok ? "valid" : "invalid") << ": " << m.name << "\n";
  return all_ok ? kExitOk : 1;
}

inline int cmdReport(const std::string& trace_file,
                     std::optional<int> base_channels = {},
                     bool differenced_base = false) {
  try {
    std::ifstream in(trace_file);
    if (!in) throw ParseError("cannot open " + trace_file);
    const ParsedTrace parsed = readTraceCsv(in, base_channels);
    if (parsed.records.size() < 2) {
      throw ParseError(trace_file + ": need at least 2 rows to infer dt");
    }
    const double dt = parsed.records[1].time - parsed.records[0].time;
    const MetricsReport report = computeMetrics(
        parsed.records, parsed.base_channels, dt, differenced_base);
    std::cout << renderReportText(report);
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParseError;
  }
}

}  // namespace slithers
