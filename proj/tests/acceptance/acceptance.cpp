// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exit status is the number of
// failed criteria.

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <unsupported/Eigen/MatrixFunctions>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "slithers/cli.hpp"
#include "slithers/io.hpp"
#include "slithers/metrics.hpp"
#include "slithers/paths.hpp"
#include "slithers/planner.hpp"
#include "slithers/simulator.hpp"

using namespace slithers;
namespace fs = std::filesystem;

namespace {

const std::string kData = SLITHERS_TEST_DATA_DIR;

std::mt19937 gen(20240817u);

double uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(gen);
}

Twist randomTwist(double max_angle, double linear_scale) {
  Eigen::Vector3d w{uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)};
  const double target = uniform(0.0, max_angle);
  if (w.norm() > 1e-12) w *= target / w.norm();
  return {w, Eigen::Vector3d{uniform(-linear_scale, linear_scale),
                             uniform(-linear_scale, linear_scale),
                             uniform(-linear_scale, linear_scale)}};
}

struct SixRuns {
  std::vector<ExperimentResult> results;  // husky x3, xdrive x3
  std::vector<RobotModel> models;
  double wall_seconds = 0.0;
};

SixRuns runAllSix() {
  SixRuns out;
  const auto t0 = std::chrono::steady_clock::now();
  for (const char* robot : {"ur5e_husky.json", "ur5e_xdrive.json"}) {
    const RobotModel m = loadRobot(kData + "/" + robot);
    for (const char* pf :
         {"vertical_helix.json", "sine_wave.json", "horizontal_helix.json"}) {
      const DesiredPath path = sample(loadPathParams(kData + "/" + pf));
      PlannerConfig cfg = PlannerConfig::defaultsFor(m);
      cfg.dt = path.dt;
      out.results.push_back(
          run(m, path, cfg, PlannerState::initial(m, m.initial_joint_values)));
      out.models.push_back(m);
    }
  }
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return out;
}

// --------------------------------------------------------------------------

bool criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_roundtrip = 0.0;
  double worst_oracle = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Twist t = randomTwist(kPi - 0.1, 2.0);
    const Twist back = logSe3(expSe3(t));
    worst_roundtrip = std::max(
        worst_roundtrip, (back.vector() - t.vector()).cwiseAbs().maxCoeff());
    const Eigen::Matrix4d oracle = hat(t).exp();
    worst_oracle = std::max(
        worst_oracle,
        (expSe3(t).matrix() - oracle).cwiseAbs().maxCoeff());
    const Twist hv = vee(hat(t));
    if (hv.angular != t.angular || hv.linear != t.linear) {
      std::printf("FAIL criterion 1: hat/vee not exact inverses\n");
      return false;
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  const bool ok = worst_roundtrip < 1e-9 && worst_oracle < 1e-9 && secs < 5.0;
  std::printf(
      "%s criterion 1: Lie core (roundtrip %.2e, exp-vs-oracle %.2e, "
      "hat/vee exact, %.2f s)\n",
      ok ? "PASS" : "FAIL", worst_roundtrip, worst_oracle, secs);
  return ok;
}

bool criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  const RobotModel m = loadRobot(kData + "/ur5e_husky.json");
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd q(m.jointCount());
    for (int j = 0; j < m.jointCount(); ++j) q[j] = uniform(-kPi, kPi);
    // Transform-chain oracle: rotation about each joint's axis line via
    // AngleAxis, never through the exponential map under test.
    Eigen::Matrix4d acc = Eigen::Matrix4d::Identity();
    for (int j = 0; j < m.jointCount(); ++j) {
      const auto& joint = m.joints[j];
      Eigen::Matrix4d link = Eigen::Matrix4d::Identity();
      if (joint.kind == JointKind::revolute) {
        const Eigen::Matrix3d r =
            Eigen::AngleAxisd(q[j], joint.axis).toRotationMatrix();
        link.topLeftCorner<3, 3>() = r;
        link.topRightCorner<3, 1>() = joint.point - r * joint.point;
      } else {
        link.topRightCorner<3, 1>() = q[j] * joint.axis;
      }
      acc *= link;
    }
    const Eigen::Matrix4d oracle = acc * m.home_pose.matrix();
    worst = std::max(worst,
                     (fkArm(m, q).matrix() - oracle).cwiseAbs().maxCoeff());
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  const bool ok = worst < 1e-10 && secs < 1.0;
  std::printf("%s criterion 2: FK oracle equivalence (max dev %.2e, %.2f s)\n",
              ok ? "PASS" : "FAIL", worst, secs);
  return ok;
}

bool criterion3() {
  const RobotModel m = loadRobot(kData + "/ur5e_husky.json");
  double worst = 0.0;
  int checked = 0;
  while (checked < 100) {
    Eigen::VectorXd cmd(2);
    cmd << uniform(-2, 2), uniform(-kPi, kPi);
    Eigen::VectorXd q(m.jointCount());
    for (int j = 0; j < m.jointCount(); ++j) q[j] = uniform(-1.2, 1.2);
    const InputVector u{cmd, q};
    const Pose base = expSe3(randomTwist(1.5, 2.0));
    Twist joints_side;
    try {
      joints_side = tauJoints(m, u, 0.2);
    } catch (const LogDomainError&) {
      continue;
    }
    const Pose desired = fkWithBase(m, base, u, 0.2);
    const Twist poses_side = tauPoses(base, desired, m.home_pose);
    worst = std::max(worst, (joints_side.vector() - poses_side.vector())
                                .cwiseAbs()
                                .maxCoeff());
    ++checked;
  }
  const bool ok = worst < 1e-8;
  std::printf("%s criterion 3: inverse-constraint consistency (max %.2e)\n",
              ok ? "PASS" : "FAIL", worst);
  return ok;
}

bool criterion4() {
  const RobotModel m = loadRobot(kData + "/ur5e_husky.json");
  const PlannerConfig cfg = PlannerConfig::defaultsFor(m);
  double worst = 0.0;
  int checked = 0;
  while (checked < 100) {
    PlannerState state = PlannerState::initial(m, m.initial_joint_values);
    state.base_pose = expSe3(randomTwist(1.0, 1.0));
    const Eigen::VectorXd lo = m.lowerBounds();
    const Eigen::VectorXd hi = m.upperBounds();
    Eigen::VectorXd x(m.inputDimension());
    for (int c = 0; c < m.inputDimension(); ++c) {
      x[c] = uniform(std::max(lo[c], -1.2), std::min(hi[c], 1.2));
    }
    const Pose desired = expSe3(randomTwist(1.0, 1.0));
    Eigen::VectorXd analytic;
    try {
      analytic = costGradient(InputVector::fromStacked(x, 2), desired, state,
                              m, cfg);
    } catch (const LogDomainError&) {
      continue;
    }
    const auto f = [&](const Eigen::VectorXd& v) {
      return cost(InputVector::fromStacked(v, 2), desired, state, m, cfg);
    };
    const Eigen::VectorXd fd = centralDifferenceGradient(f, x, 1e-6);
    worst = std::max(worst, (analytic - fd).norm() / std::max(1.0, fd.norm()));
    ++checked;
  }
  const bool ok = worst < 1e-4;
  std::printf("%s criterion 4: cost-gradient check (max rel err %.2e)\n",
              ok ? "PASS" : "FAIL", worst);
  return ok;
}

bool criterion5(const SixRuns& six) {
  bool ok = true;
  int rot_ok = 0;
  double worst_pos = 0.0, worst_ss = 0.0;
  for (const auto& result : six.results) {
    const MetricsReport rep = computeMetrics(result);
    worst_pos = std::max(worst_pos, rep.position_rmse);
    if (rep.position_rmse > 0.05) ok = false;
    if (rep.rotation_rmse <= 0.10) ++rot_ok;
    double ss = 0.0;
    for (std::size_t k = result.trace.size() * 3 / 4; k < result.trace.size();
         ++k) {
      ss = std::max(ss, result.trace[k].position_error);
    }
    worst_ss = std::max(worst_ss, ss);
    if (ss > 0.01) ok = false;
  }
  if (rot_ok < 5) ok = false;
  std::printf(
      "%s criterion 5: path-following benchmark (pos RMSE max %.4f <= 0.05, "
      "rot RMSE ok %d/6 >= 5, steady-state max %.2e <= 0.01)\n",
      ok ? "PASS" : "FAIL", worst_pos, rot_ok, worst_ss);
  return ok;
}

bool criterion6(const SixRuns& six) {
  for (std::size_t r = 0; r < six.results.size(); ++r) {
    const Eigen::VectorXd lo = six.models[r].lowerBounds();
    const Eigen::VectorXd hi = six.models[r].upperBounds();
    for (const auto& rec : six.results[r].trace) {
      const Eigen::VectorXd u = rec.input.stacked();
      for (Eigen::Index c = 0; c < u.size(); ++c) {
        if (u[c] < lo[c] || u[c] > hi[c]) {
          std::printf("FAIL criterion 6: input outside limits (run %zu, step "
                      "%d, channel %ld)\n",
                      r, rec.step, static_cast<long>(c));
          return false;
        }
      }
    }
  }
  std::printf("PASS criterion 6: feasibility (zero box violations, exact)\n");
  return true;
}

bool criterion7(const SixRuns& six) {
  double worst_mean = 0.0;
  for (const auto& result : six.results) {
    worst_mean = std::max(worst_mean, computeMetrics(result).mean_solve_time);
  }
  const bool ok = worst_mean <= 0.2 && six.wall_seconds <= 300.0;
  std::printf(
      "%s criterion 7: performance (worst mean solve %.4f s <= 0.2, six-run "
      "wall %.1f s <= 300)\n",
      ok ? "PASS" : "FAIL", worst_mean, six.wall_seconds);
  return ok;
}

bool criterion8(const SixRuns& six) {
  double worst = 0.0;
  for (std::size_t r = 0; r < six.results.size(); ++r) {
    if (six.models[r].base.kind != BaseKind::nonholonomic) continue;
    Pose prev = Pose::Identity();
    for (const auto& rec : six.results[r].trace) {
      const Twist step = logSe3(compose(inverse(prev), rec.base_pose));
      worst = std::max(worst, std::abs(step.linear.y()));
      prev = rec.base_pose;
    }
  }
  const bool ok = worst <= 1e-12;
  std::printf(
      "%s criterion 8: nonholonomic constraint (max body-frame lateral %.2e)\n",
      ok ? "PASS" : "FAIL", worst);
  return ok;
}

bool criterion9() {
  const RobotModel m = loadRobot(kData + "/ur5e_husky.json");
  PlannerConfig cfg = PlannerConfig::defaultsFor(m);
  const InputVector rest = InputVector::zeroMotion(m, m.initial_joint_values);
  const Pose hold = fkWithBase(m, Pose::Identity(), rest, cfg.dt);
  DesiredPath path;
  path.dt = cfg.dt;
  path.duration = 20 * cfg.dt;
  path.name = "stay_put";
  path.samples.assign(20, hold);
  const auto result =
      run(m, path, cfg, PlannerState::initial(m, m.initial_joint_values));
  double worst_motion = 0.0, worst_err = 0.0;
  Eigen::VectorXd prev_q = m.initial_joint_values;
  for (const auto& rec : result.trace) {
    worst_motion = std::max(worst_motion, rec.input.base_command.norm()
                                              + (rec.input.joint_values - prev_q)
                                                    .norm());
    prev_q = rec.input.joint_values;
    worst_err = std::max(worst_err, rec.position_error);
  }
  const bool ok = worst_motion < 1e-6 && worst_err < 1e-6;
  std::printf(
      "%s criterion 9: stay-put fixed point (max motion %.2e, max error "
      "%.2e)\n",
      ok ? "PASS" : "FAIL", worst_motion, worst_err);
  return ok;
}

// Masks wall-clock fields; timing is excluded from byte-identity checks.
std::string maskedTrace(const fs::path& file) {
  std::ifstream in(file);
  std::stringstream out;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      out << line << "\n";
      header = false;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) fields.push_back(cell);
    if (fields.size() >= 2) fields[fields.size() - 2] = "<time>";
    for (std::size_t i = 0; i < fields.size(); ++i) {
      out << (i ? "," : "") << fields[i];
    }
    out << "\n";
  }
  return out.str();
}

std::string maskedReport(const fs::path& file) {
  std::ifstream in(file);
  std::stringstream out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find("mean_solve_time") != std::string::npos
        || line.find("Computation Time") != std::string::npos) {
      out << "<time>\n";
    } else {
      out << line << "\n";
    }
  }
  return out.str();
}

bool criterion10() {
  const fs::path root = fs::temp_directory_path() / "slithers_acceptance";
  fs::remove_all(root);
  const fs::path a = root / "a";
  const fs::path b = root / "b";
  for (const auto& dir : {a, b}) {
    const std::string cmd = std::string(SLITHERS_CLI_PATH) + " run --all --out "
                            + dir.string() + " > /dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) {
      std::printf("FAIL criterion 10: cmd_run --all did not exit cleanly\n");
      return false;
    }
  }
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    const fs::path rel = entry.path().filename();
    if (maskedTrace(a / rel / "trace.csv") != maskedTrace(b / rel / "trace.csv")) {
      std::printf("FAIL criterion 10: traces differ for %s\n",
                  rel.string().c_str());
      return false;
    }
    for (const char* f : {"report.json", "report.txt"}) {
      if (maskedReport(a / rel / f) != maskedReport(b / rel / f)) {
        std::printf("FAIL criterion 10: %s differs for %s\n", f,
                    rel.string().c_str());
        return false;
      }
    }
    ++compared;
  }
  const bool ok = compared == 6;
  std::printf(
      "%s criterion 10: determinism (%d run dirs byte-identical, wall-clock "
      "fields masked)\n",
      ok ? "PASS" : "FAIL", compared);
  return ok;
}

}  // namespace

int main() {
  int failures = 0;
  failures += !criterion1();
  failures += !criterion2();
  failures += !criterion3();
  failures += !criterion4();
  const SixRuns six = runAllSix();
  failures += !criterion5(six);
  failures += !criterion6(six);
  failures += !criterion7(six);
  failures += !criterion8(six);
  failures += !criterion9();
  failures += !criterion10();
  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures;
}
