#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "slithers/cli.hpp"
#include "test_helpers.hpp"

using namespace slithers;
namespace fs = std::filesystem;

namespace {

const std::string kData = SLITHERS_TEST_DATA_DIR;

fs::path freshDir(const char* name) {
  const auto dir = fs::temp_directory_path() / "slithers_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string readFile(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int runBinary(const std::string& args) {
  const std::string cmd = std::string(SLITHERS_CLI_PATH) + " " + args
                          + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("cmdRun: single run writes trace and reports") {
  const auto out = freshDir("single");
  RunManifest manifest;
  manifest.robot_file = kData + "/ur5e_husky.json";
  manifest.path_file = kData + "/sine_wave.json";
  manifest.output_directory = out.string();
  manifest.overrides.duration = 4.0;
  REQUIRE(cmdRun(manifest) == kExitOk);

  const auto run_dir = out / "ur5e_husky__sine_wave";
  CHECK(fs::exists(run_dir / "trace.csv"));
  CHECK(fs::exists(run_dir / "report.json"));
  CHECK(fs::exists(run_dir / "report.txt"));

  std::ifstream in(run_dir / "trace.csv");
  const ParsedTrace parsed = readTraceCsv(in);
  CHECK(parsed.records.size() == 21);  // 4 s at 0.2 s
}

TEST_CASE("cmdRun: missing file exits 2, bad lambda_v dimension exits 3") {
  RunManifest manifest;
  manifest.robot_file = kData + "/nonexistent.json";
  manifest.path_file = kData + "/sine_wave.json";
  manifest.output_directory = freshDir("err2").string();
  CHECK(cmdRun(manifest) == kExitParseError);

  manifest.robot_file = kData + "/ur5e_husky.json";
  manifest.overrides.lambda_v = std::vector<double>{1.0, 1.0, 1.0};
  manifest.output_directory = freshDir("err3").string();
  CHECK(cmdRun(manifest) == kExitDimensionError);
}

TEST_CASE("cmdRun: config precedence is cli > file > built-in") {
  const auto out = freshDir("precedence");
  RunManifest manifest;
  manifest.robot_file = kData + "/ur5e_husky.json";
  manifest.path_file = kData + "/sine_wave.json";
  manifest.output_directory = out.string();
  manifest.overrides.duration = 2.0;  // overrides the file's 20 s
  manifest.overrides.dt = 0.1;        // overrides the file's 0.2 s
  REQUIRE(cmdRun(manifest) == kExitOk);
  std::ifstream in(out / "ur5e_husky__sine_wave" / "trace.csv");
  const ParsedTrace parsed = readTraceCsv(in);
  CHECK(parsed.records.size() == 21);  // 2 s at 0.1 s
  CHECK(parsed.records[1].time == 0.1);
}

TEST_CASE("cmdValidate: bundled files pass, broken files fail with diagnostics") {
  CHECK(cmdValidate(kData + "/ur5e_husky.json") == kExitOk);
  CHECK(cmdValidate(kData + "/ur5e_xdrive.json") == kExitOk);

  const auto dir = freshDir("validate");
  const auto bad_axis = dir / "bad_axis.json";
  {
    json j = detail::loadJsonFile(kData + "/ur5e_husky.json");
    j["joints"][0]["axis"] = {0.0, 0.0, 2.0};
    std::ofstream out(bad_axis);
    out << j.dump(2);
  }
  CHECK(cmdValidate(bad_axis.string()) == 1);

  const auto bad_det = dir / "bad_det.json";
  {
    json j = detail::loadJsonFile(kData + "/ur5e_husky.json");
    j["home_pose"]["rotation"] = {-1.0, 0, 0, 0, 1.0, 0, 0, 0, 1.0};
    std::ofstream out(bad_det);
    out << j.dump(2);
  }
  CHECK(cmdValidate(bad_det.string()) == 1);

  const auto garbage = dir / "garbage.json";
  {
    std::ofstream out(garbage);
    out << "{ not json";
  }
  CHECK(cmdValidate(garbage.string()) == kExitParseError);
}

TEST_CASE("cmdReport: run-then-report reproduces the stored report") {
  const auto out = freshDir("report");
  RunManifest manifest;
  manifest.robot_file = kData + "/ur5e_xdrive.json";
  manifest.path_file = kData + "/horizontal_helix.json";
  manifest.output_directory = out.string();
  manifest.overrides.duration = 4.0;
  REQUIRE(cmdRun(manifest) == kExitOk);
  const auto run_dir = out / "ur5e_xdrive__horizontal_helix";

  // The binary prints exactly what run wrote to report.txt.
  const std::string piped = run_dir.string() + "/stdout.txt";
  const int status = std::system((std::string(SLITHERS_CLI_PATH) + " report "
                                  + (run_dir / "trace.csv").string() + " > "
                                  + piped)
                                     .c_str());
  REQUIRE(WEXITSTATUS(status) == 0);
  CHECK(readFile(piped) == readFile(run_dir / "report.txt"));
}

TEST_CASE("cmdReport: truncated and empty traces") {
  const auto dir = freshDir("report_edge");
  const auto out = freshDir("report_src");
  RunManifest manifest;
  manifest.robot_file = kData + "/ur5e_husky.json";
  manifest.path_file = kData + "/sine_wave.json";
  manifest.output_directory = out.string();
  manifest.overrides.duration = 4.0;
  REQUIRE(cmdRun(manifest) == kExitOk);

  // keep header + 3 rows
  const auto full = out / "ur5e_husky__sine_wave" / "trace.csv";
  const auto truncated = dir / "truncated.csv";
  {
    std::ifstream in(full);
    std::ofstream trunc(truncated);
    std::string line;
    for (int i = 0; i < 4 && std::getline(in, line); ++i) {
      trunc << line << "\n";
    }
  }
  CHECK(cmdReport(truncated.string()) == kExitOk);

  const auto empty = dir / "empty.csv";
  { std::ofstream e(empty); }
  CHECK(cmdReport(empty.string()) == kExitParseError);
}

TEST_CASE("binary: subcommands wire through with documented exit codes") {
  CHECK(runBinary("validate " + kData + "/ur5e_husky.json") == 0);
  CHECK(runBinary("validate /nonexistent.json") == 2);
  CHECK(runBinary("report /nonexistent.csv") == 2);
  const auto out = freshDir("binary_run");
  CHECK(runBinary("run --robot " + kData + "/ur5e_husky.json --path " + kData
                  + "/sine_wave.json --duration 2 --out " + out.string())
        == 0);
  CHECK(fs::exists(out / "ur5e_husky__sine_wave" / "trace.csv"));
  CHECK(runBinary("run") == 2);  // needs --robot/--path or --all
}

TEST_CASE("binary: lambda-v override of wrong length exits 3") {
  const auto out = freshDir("binary_lambda");
  CHECK(runBinary("run --robot " + kData + "/ur5e_husky.json --path " + kData
                  + "/sine_wave.json --duration 2 --lambda-v 1,2,3 --out "
                  + out.string())
        == 3);
}

TEST_CASE("cmdRun: parallel jobs produce the same traces as sequential") {
  const auto seq = freshDir("jobs_seq");
  const auto par = freshDir("jobs_par");
  RunManifest manifest;
  manifest.all = true;
  manifest.data_dir = kData;
  manifest.overrides.duration = 2.0;
  manifest.output_directory = seq.string();
  manifest.jobs = 1;
  REQUIRE(cmdRun(manifest) == kExitOk);
  manifest.output_directory = par.string();
  manifest.jobs = 3;
  REQUIRE(cmdRun(manifest) == kExitOk);
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(seq)) {
    const auto rel = entry.path().filename();
    // solve_time differs run to run; compare everything before that column
    std::ifstream a(seq / rel / "trace.csv"), b(par / rel / "trace.csv");
    std::string la, lb;
    while (std::getline(a, la) && std::getline(b, lb)) {
      CHECK(la.substr(0, la.rfind(',', la.rfind(',') - 1))
            == lb.substr(0, lb.rfind(',', lb.rfind(',') - 1)));
    }
    ++compared;
  }
  CHECK(compared == 6);
}

TEST_CASE("cmdRun: solver overrides reach the per-step solves") {
  const auto out = freshDir("override_iters");
  RunManifest manifest;
  manifest.robot_file = kData + "/ur5e_husky.json";
  manifest.path_file = kData + "/sine_wave.json";
  manifest.output_directory = out.string();
  manifest.overrides.duration = 2.0;
  manifest.overrides.max_iterations = 1;
  REQUIRE(cmdRun(manifest) == kExitOk);  // non-converged steps are not fatal
  std::ifstream in(out / "ur5e_husky__sine_wave" / "trace.csv");
  const ParsedTrace parsed = readTraceCsv(in);
  for (const auto& rec : parsed.records) {
    CHECK(rec.iterations <= 1);
  }
}

TEST_CASE("binary: SLITHERS_DATA_DIR redirects the bundled asset lookup") {
  const auto fake = freshDir("env_data");
  const auto out = freshDir("env_out");
  // Empty data dir: run --all must fail to find the bundled robots (exit 2).
  const std::string cmd = "SLITHERS_DATA_DIR=" + fake.string() + " "
                          + SLITHERS_CLI_PATH + " run --all --out "
                          + out.string() + " > /dev/null 2>&1";
  CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 2);
}
