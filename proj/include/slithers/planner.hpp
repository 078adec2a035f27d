#pragma once

// Step-wise optimization-based inverse kinematics. Each step minimizes
//
//   lambda_e ||tau_joints(u) - tau_poses||
//     + ||lambda_v o (u - u_k)||
//     + lambda_j ||jerk(u)||
//
// over the box of input limits, where o is the Hadamard product and the jerk
// is a third-order backward finite difference over the input history. Norms
// are plain (unsquared) Euclidean norms, so the pose-error term acts as an
// exact penalty and steady-state tracking error is driven to zero whenever
// the weights allow it.
//
// The pose-error twist mixes radians and meters with unit weight inside the
// norm; rescale the model's units if a different balance is needed.

#include <Eigen/Core>

#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "slithers/errors.hpp"
#include "slithers/kinematics.hpp"
#include "slithers/liegroup.hpp"
#include "slithers/solver.hpp"

namespace slithers {

struct PlannerConfig {
  double lambda_e = 25.0;
  Eigen::VectorXd lambda_v;  // one weight per input channel
  double lambda_j = 0.001;
  double dt = 0.2;
  int max_iterations = 200;
  double gradient_tolerance = 1e-8;
  double step_tolerance = 1e-10;
  // Central finite differences of the cost instead of the analytic gradient.
  bool finite_difference_gradient = false;
  double fd_step = 1e-6;

  // Motion weights: base channels lead with weight 1, the two proximal
  // (large) joints get 0.25, the remaining joints 0.1.
  static Eigen::VectorXd defaultMotionWeights(int base_channels, int joints) {
    Eigen::VectorXd w(base_channels + joints);
    for (int c = 0; c < base_channels; ++c) w[c] = 1.0;
    for (int j = 0; j < joints; ++j) {
      w[base_channels + j] = j < 2 ? 0.25 : 0.1;
    }
    return w;
  }

  static PlannerConfig defaultsFor(const RobotModel& m) {
    PlannerConfig cfg;
    cfg.lambda_v = defaultMotionWeights(m.base.channels(), m.jointCount());
    return cfg;
  }

  void validate(const RobotModel& m) const {
    if (lambda_v.size() != m.inputDimension()) {
      throw DimensionError("lambda_v has " + std::to_string(lambda_v.size())
                           + " entries, model input dimension is "
                           + std::to_string(m.inputDimension()));
    }
    if (!(lambda_e >= 0.0) || !(lambda_j >= 0.0) || !lambda_v.allFinite()
        || lambda_v.minCoeff() < 0.0) {
      throw LimitError("planner weights must be finite and non-negative");
    }
    if (!(dt > 0.0)) throw LimitError("dt must be positive");
    if (max_iterations <= 0) throw LimitError("max_iterations must be positive");
  }
};

// World-frame base pose plus the last three inputs (u_k at the front).
struct PlannerState {
  Pose base_pose;
  std::array<InputVector, 3> history;

  // Stationary start: history filled with the zero-motion input at q0.
  static PlannerState initial(const RobotModel& m, const Eigen::VectorXd& q0,
                              const Pose& base_pose = Pose::Identity()) {
    PlannerState s;
    s.base_pose = base_pose;
    const InputVector rest = InputVector::zeroMotion(m, q0);
    s.history = {rest, rest, rest};
    return s;
  }
};

struct StepSolution {
  InputVector input;
  Pose predicted_pose;
  double cost = 0.0;
  double pose_error_translation = 0.0;
  double pose_error_rotation = 0.0;
  int iterations = 0;
  double solve_time = 0.0;
  bool converged = true;
};

// Third-order backward difference (exact for cubics):
//   (u - 3 u_k + 3 u_{k-1} - u_{k-2}) / dt^3
inline Eigen::VectorXd jerkEstimate(const std::array<InputVector, 3>& history,
                                    const Eigen::VectorXd& candidate,
                                    double dt) {
  if (!(dt > 0.0)) throw LimitError("jerkEstimate: dt must be positive");
  // Grouped as successive differences so a constant sequence is exactly zero.
  const Eigen::VectorXd u_k = history[0].stacked();
  const Eigen::VectorXd u_k1 = history[1].stacked();
  const Eigen::VectorXd u_k2 = history[2].stacked();
  return ((candidate - u_k) - 2.0 * (u_k - u_k1) + (u_k1 - u_k2))
         / (dt * dt * dt);
}

namespace detail {

struct CostTerms {
  Twist tau_target;          // tau_poses, fixed within a step
  Eigen::VectorXd previous;  // u_k stacked
  Eigen::VectorXd jerk_bias; // 3 u_k - 3 u_{k-1} + u_{k-2}
};

inline CostTerms makeCostTerms(const Pose& desired, const PlannerState& state,
                               const RobotModel& m) {
  CostTerms terms;
  terms.tau_target = tauPoses(state.base_pose, desired, m.home_pose);
  terms.previous = state.history[0].stacked();
  terms.jerk_bias = 3.0 * state.history[0].stacked()
                    - 3.0 * state.history[1].stacked()
                    + state.history[2].stacked();
  return terms;
}

inline double costFromTerms(const Eigen::VectorXd& candidate,
                            const CostTerms& terms, const RobotModel& m,
                            const PlannerConfig& cfg) {
  const InputVector u = InputVector::fromStacked(candidate, m.base.channels());
  const Vector6d residual =
      tauJoints(m, u, cfg.dt).vector() - terms.tau_target.vector();
  const double dt3 = cfg.dt * cfg.dt * cfg.dt;
  return cfg.lambda_e * residual.norm()
         + (cfg.lambda_v.cwiseProduct(candidate - terms.previous)).norm()
         + cfg.lambda_j * ((candidate - terms.jerk_bias) / dt3).norm();
}

// Gradient of the three-term sum. Each norm contributes x/||x|| pulled back
// through its linear (or chain-rule) map; exact zeros contribute nothing
// (any subgradient works there, zero keeps the solver stationary).
inline Eigen::VectorXd costGradientFromTerms(const Eigen::VectorXd& candidate,
                                             const CostTerms& terms,
                                             const RobotModel& m,
                                             const PlannerConfig& cfg) {
  const InputVector u = InputVector::fromStacked(candidate, m.base.channels());
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(candidate.size());

  const Vector6d residual =
      tauJoints(m, u, cfg.dt).vector() - terms.tau_target.vector();
  const double rnorm = residual.norm();
  if (rnorm > 0.0) {
    const auto jac = tauJointsJacobian(m, u, cfg.dt);
    grad += cfg.lambda_e * (jac.transpose() * (residual / rnorm));
  }

  const Eigen::VectorXd motion =
      cfg.lambda_v.cwiseProduct(candidate - terms.previous);
  const double mnorm = motion.norm();
  if (mnorm > 0.0) {
    grad += cfg.lambda_v.cwiseProduct(motion) / mnorm;
  }

  const double dt3 = cfg.dt * cfg.dt * cfg.dt;
  const Eigen::VectorXd jerk = (candidate - terms.jerk_bias) / dt3;
  const double jnorm = jerk.norm();
  if (jnorm > 0.0) {
    grad += (cfg.lambda_j / (dt3 * jnorm)) * jerk;
  }
  return grad;
}

}  // namespace detail

inline double cost(const InputVector& candidate, const Pose& desired,
                   const PlannerState& state, const RobotModel& m,
                   const PlannerConfig& cfg) {
  checkInputDimension(m, candidate);
  const auto terms = detail::makeCostTerms(desired, state, m);
  return detail::costFromTerms(candidate.stacked(), terms, m, cfg);
}

inline Eigen::VectorXd costGradient(const InputVector& candidate,
                                    const Pose& desired,
                                    const PlannerState& state,
                                    const RobotModel& m,
                                    const PlannerConfig& cfg) {
  checkInputDimension(m, candidate);
  const auto terms = detail::makeCostTerms(desired, state, m);
  return detail::costGradientFromTerms(candidate.stacked(), terms, m, cfg);
}

inline Eigen::VectorXd centralDifferenceGradient(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double fp = f(probe);
    probe[i] = x[i] - h;
    const double fm = f(probe);
    probe[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

// One receding-horizon step: minimize the smoothed pose-tracking cost within
// the box limits, warm-started at u_k with the base channels pulled halfway
// toward zero. Exhausting max_iterations returns the best iterate flagged
// non-converged rather than failing.
inline StepSolution solveStep(const Pose& desired, const PlannerState& state,
                              const RobotModel& m, const PlannerConfig& cfg) {
  cfg.validate(m);
  const auto t_start = std::chrono::steady_clock::now();

  const auto terms = detail::makeCostTerms(desired, state, m);

  Eigen::VectorXd x0 = state.history[0].stacked();
  x0.head(m.base.channels()) *= 0.5;

  // Out-of-chart candidates (log too close to pi) read as +inf so the line
  // search backs away from them; the start point must itself be in-chart.
  const auto objective = [&](const Eigen::VectorXd& x) -> double {
    try {
      return detail::costFromTerms(x, terms, m, cfg);
    } catch (const LogDomainError&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  detail::costFromTerms(x0, terms, m, cfg);  // propagates LogDomainError

  const auto gradient = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    if (cfg.finite_difference_gradient) {
      return centralDifferenceGradient(objective, x, cfg.fd_step);
    }
    return detail::costGradientFromTerms(x, terms, m, cfg);
  };

  SolverOptions opts;
  opts.max_iterations = cfg.max_iterations;
  opts.gradient_tolerance = cfg.gradient_tolerance;
  opts.step_tolerance = cfg.step_tolerance;
  const SolverResult res =
      minimizeBox(objective, gradient, x0, m.lowerBounds(), m.upperBounds(), opts);

  StepSolution sol;
  sol.input = InputVector::fromStacked(res.x, m.base.channels());
  sol.cost = res.value;
  sol.iterations = res.iterations;
  sol.converged = res.converged;
  sol.predicted_pose = fkWithBase(m, state.base_pose, sol.input, cfg.dt);
  sol.pose_error_translation =
      (sol.predicted_pose.translation - desired.translation).norm();
  sol.pose_error_rotation = rotationAngle(sol.predicted_pose, desired);
  sol.solve_time = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - t_start)
                       .count();
  return sol;
}

// Integrates the solved base command (exact constant-twist arc) and shifts
// the input history.
inline PlannerState advance(const PlannerState& state, const StepSolution& sol,
                            const RobotModel& m, const PlannerConfig& cfg) {
  PlannerState next;
  next.base_pose = compose(
      state.base_pose, expSe3(baseTwist(m.base, sol.input.base_command, cfg.dt)));
  next.history = {sol.input, state.history[0], state.history[1]};
  return next;
}

// Runs solveStep/advance over every waypoint. Steps whose start point falls
// outside the log chart are recorded as zero-motion holds flagged
// non-converged; the plan never aborts mid-path.
inline std::vector<StepSolution> planPath(const std::vector<Pose>& path,
                                          const PlannerState& initial,
                                          const RobotModel& m,
                                          const PlannerConfig& cfg) {
  std::vector<StepSolution> solutions;
  solutions.reserve(path.size());
  PlannerState state = initial;
  for (const Pose& desired : path) {
    StepSolution sol;
    try {
      sol = solveStep(desired, state, m, cfg);
    } catch (const LogDomainError&) {
      sol.input = InputVector::zeroMotion(m, state.history[0].joint_values);
      sol.cost = std::numeric_limits<double>::quiet_NaN();
      sol.converged = false;
      sol.predicted_pose = fkWithBase(m, state.base_pose, sol.input, cfg.dt);
      sol.pose_error_translation =
          (sol.predicted_pose.translation - desired.translation).norm();
      sol.pose_error_rotation = rotationAngle(sol.predicted_pose, desired);
    }
    state = advance(state, sol, m, cfg);
    solutions.push_back(sol);
  }
  return solutions;
}

}  // namespace slithers
