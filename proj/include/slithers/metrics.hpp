#pragma once

// Summary metrics over a completed trace: RMSE of position and rotation,
// per-channel maxima of velocity/acceleration/jerk, mean solve time.
//
// Conventions: base "velocity" is the commanded value itself (the input mixes
// joint positions with base velocities); joint velocity is differenced from
// consecutive joint positions. Accelerations and jerks are first and second
// backward differences of the velocity signals at spacing dt. A report flag
// switches the base family to differenced signals instead of commanded ones.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "slithers/errors.hpp"
#include "slithers/simulator.hpp"

namespace slithers {

struct MetricsReport {
  int steps = 0;
  int base_channels = 0;
  int joint_count = 0;
  bool holonomic = false;
  bool differenced_base = false;  // alternative interpretation flag
  double dt = 0.0;

  double position_rmse = 0.0;
  double rotation_rmse = 0.0;
  double mean_solve_time = 0.0;

  std::optional<double> max_forward_velocity;
  std::optional<double> max_translation_velocity;  // holonomic only
  std::optional<double> max_angular_velocity;
  std::optional<double> max_forward_acceleration;
  std::optional<double> max_translation_acceleration;
  std::optional<double> max_angular_acceleration;
  std::optional<double> max_forward_jerk;
  std::optional<double> max_translation_jerk;
  std::optional<double> max_angular_jerk;
  std::optional<double> max_joint_velocity;
  std::optional<double> max_joint_acceleration;
  std::optional<double> max_joint_jerk;
};

// Root-mean-square of the recorded per-step position and rotation errors.
// Non-converged steps are included.
inline std::pair<double, double> rmse(const std::vector<TraceRecord>& trace) {
  if (trace.empty()) throw DimensionError("rmse: empty trace");
  double pos = 0.0;
  double rot = 0.0;
  for (const auto& rec : trace) {
    pos += rec.position_error * rec.position_error;
    rot += rec.rotation_error * rec.rotation_error;
  }
  const double n = static_cast<double>(trace.size());
  return {std::sqrt(pos / n), std::sqrt(rot / n)};
}

namespace detail {

inline std::optional<double> maxAbs(const std::vector<double>& xs) {
  if (xs.empty()) return std::nullopt;
  double m = 0.0;
  for (double x : xs) m = std::max(m, std::abs(x));
  return m;
}

inline std::vector<double> backwardDifference(const std::vector<double>& xs,
                                              double dt) {
  std::vector<double> out;
  if (xs.size() < 2) return out;
  out.reserve(xs.size() - 1);
  for (std::size_t k = 1; k < xs.size(); ++k) {
    out.push_back((xs[k] - xs[k - 1]) / dt);
  }
  return out;
}

}  // namespace detail

// Fills the velocity/acceleration/jerk maxima. Fields whose difference chain
// is not supported by the trace length stay unset.
inline void channelDerivativeMaxima(const std::vector<TraceRecord>& trace,
                                    double dt, bool differenced_base,
                                    MetricsReport& report) {
  const int nb = report.base_channels;
  const int nj = report.joint_count;
  const int yaw = nb - 1;

  // Base velocity signals, per channel.
  std::vector<std::vector<double>> base_vel(nb);
  if (differenced_base) {
    // Twist of each recorded per-step base displacement, divided by dt. Only
    // pose pairs inside the trace are used, so the result is derivable from
    // the stored trace alone.
    for (std::size_t k = 1; k < trace.size(); ++k) {
      const Twist step =
          logSe3(compose(inverse(trace[k - 1].base_pose), trace[k].base_pose));
      base_vel[0].push_back(step.linear.x() / dt);
      if (nb == 3) base_vel[1].push_back(step.linear.y() / dt);
      base_vel[yaw].push_back(step.angular.z() / dt);
    }
  } else {
    for (const auto& rec : trace) {
      for (int c = 0; c < nb; ++c) {
        base_vel[c].push_back(rec.input.base_command[c]);
      }
    }
  }

  const auto accel_x = detail::backwardDifference(base_vel[0], dt);
  const auto jerk_x = detail::backwardDifference(accel_x, dt);
  const auto accel_w = detail::backwardDifference(base_vel[yaw], dt);
  const auto jerk_w = detail::backwardDifference(accel_w, dt);

  report.max_forward_velocity = detail::maxAbs(base_vel[0]);
  report.max_forward_acceleration = detail::maxAbs(accel_x);
  report.max_forward_jerk = detail::maxAbs(jerk_x);
  report.max_angular_velocity = detail::maxAbs(base_vel[yaw]);
  report.max_angular_acceleration = detail::maxAbs(accel_w);
  report.max_angular_jerk = detail::maxAbs(jerk_w);
  if (report.holonomic) {
    const auto accel_y = detail::backwardDifference(base_vel[1], dt);
    const auto jerk_y = detail::backwardDifference(accel_y, dt);
    report.max_translation_velocity = detail::maxAbs(base_vel[1]);
    report.max_translation_acceleration = detail::maxAbs(accel_y);
    report.max_translation_jerk = detail::maxAbs(jerk_y);
  }

  // Joint positions differenced once for velocity, then twice more.
  double jv = 0.0, ja = 0.0, jj = 0.0;
  bool has_jv = false, has_ja = false, has_jj = false;
  for (int j = 0; j < nj; ++j) {
    std::vector<double> q;
    q.reserve(trace.size());
    for (const auto& rec : trace) q.push_back(rec.input.joint_values[j]);
    const auto vel = detail::backwardDifference(q, dt);
    const auto acc = detail::backwardDifference(vel, dt);
    const auto jer = detail::backwardDifference(acc, dt);
    if (const auto m = detail::maxAbs(vel)) { jv = std::max(jv, *m); has_jv = true; }
    if (const auto m = detail::maxAbs(acc)) { ja = std::max(ja, *m); has_ja = true; }
    if (const auto m = detail::maxAbs(jer)) { jj = std::max(jj, *m); has_jj = true; }
  }
  if (has_jv) report.max_joint_velocity = jv;
  if (has_ja) report.max_joint_acceleration = ja;
  if (has_jj) report.max_joint_jerk = jj;
}

inline MetricsReport computeMetrics(const std::vector<TraceRecord>& trace,
                                    int base_channels, double dt,
                                    bool differenced_base = false) {
  if (trace.empty()) throw DimensionError("computeMetrics: empty trace");
  MetricsReport report;
  report.steps = static_cast<int>(trace.size());
  report.base_channels = base_channels;
  report.joint_count = static_cast<int>(trace.front().input.joint_values.size());
  report.holonomic = base_channels == 3;
  report.differenced_base = differenced_base;
  report.dt = dt;

  const auto [pos, rot] = rmse(trace);
  report.position_rmse = pos;
  report.rotation_rmse = rot;

  double t = 0.0;
  for (const auto& rec : trace) t += rec.solve_time;
  report.mean_solve_time = t / static_cast<double>(trace.size());

  channelDerivativeMaxima(trace, dt, differenced_base, report);
  return report;
}

inline MetricsReport computeMetrics(const ExperimentResult& result,
                                    bool differenced_base = false) {
  if (result.trace.empty()) throw DimensionError("computeMetrics: empty trace");
  const int nb = static_cast<int>(result.trace.front().input.base_command.size());
  return computeMetrics(result.trace, nb, result.config.dt, differenced_base);
}

}  // namespace slithers
