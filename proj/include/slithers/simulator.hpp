#pragma once

// Executes a planned run over a sampled path. Solved inputs are applied
// directly (perfect low-level tracking, no plant model); the full trace is
// recorded step by step.

#include <limits>
#include <string>
#include <vector>

#include "slithers/kinematics.hpp"
#include "slithers/liegroup.hpp"
#include "slithers/paths.hpp"
#include "slithers/planner.hpp"

namespace slithers {

struct TraceRecord {
  int step = 0;
  double time = 0.0;
  InputVector input;
  Pose base_pose;     // after the step's base motion
  Pose ee_pose;       // fkWithBase at the solved input
  Pose desired_pose;  // the waypoint this step targeted
  double position_error = 0.0;
  double rotation_error = 0.0;
  double cost = 0.0;
  int iterations = 0;
  double solve_time = 0.0;
  bool converged = true;
};

struct ExperimentResult {
  std::vector<TraceRecord> trace;
  std::string model_name;
  std::string path_name;
  PlannerConfig config;
};

// Drives the planner over every waypoint: solve, apply (instantaneously),
// advance, record. Non-converged steps are recorded, never fatal.
inline ExperimentResult run(const RobotModel& m, const DesiredPath& path,
                            const PlannerConfig& cfg,
                            const PlannerState& initial) {
  ExperimentResult result;
  result.model_name = m.name;
  result.path_name = path.name;
  result.config = cfg;
  result.trace.reserve(path.samples.size());

  PlannerState state = initial;
  int k = 0;
  for (const Pose& desired : path.samples) {
    StepSolution sol;
    try {
      sol = solveStep(desired, state, m, cfg);
    } catch (const LogDomainError&) {
      // Out of the log chart at the start point: hold still this step.
      sol.input = InputVector::zeroMotion(m, state.history[0].joint_values);
      sol.cost = std::numeric_limits<double>::quiet_NaN();
      sol.converged = false;
      sol.predicted_pose = fkWithBase(m, state.base_pose, sol.input, cfg.dt);
      sol.pose_error_translation =
          (sol.predicted_pose.translation - desired.translation).norm();
      sol.pose_error_rotation = rotationAngle(sol.predicted_pose, desired);
    }
    state = advance(state, sol, m, cfg);

    TraceRecord rec;
    rec.step = k;
    rec.time = k * path.dt;
    rec.input = sol.input;
    rec.base_pose = state.base_pose;
    rec.ee_pose = sol.predicted_pose;
    rec.desired_pose = desired;
    rec.position_error = sol.pose_error_translation;
    rec.rotation_error = sol.pose_error_rotation;
    rec.cost = sol.cost;
    rec.iterations = sol.iterations;
    rec.solve_time = sol.solve_time;
    rec.converged = sol.converged;
    result.trace.push_back(rec);
    ++k;
  }
  return result;
}

}  // namespace slithers
