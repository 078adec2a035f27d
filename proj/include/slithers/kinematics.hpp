#pragma once

// Screw-coordinate robot models and product-of-exponentials kinematics for a
// manipulator riding a planar mobile base.
//
// All joint screws and the home pose are expressed in one body-fixed frame on
// the base, so they stay time invariant; fkWithBase projects through the
// world-frame base pose. Input vectors stack [base command; joint values].

#include <Eigen/Core>

#include <string>
#include <utility>
#include <vector>

#include "slithers/errors.hpp"
#include "slithers/liegroup.hpp"

namespace slithers {

enum class JointKind { revolute, prismatic };

struct JointModel {
  JointKind kind = JointKind::revolute;
  Eigen::Vector3d axis{Eigen::Vector3d::UnitZ()};  // unit
  // A point on the joint axis (the offset d from the base frame); unused for
  // prismatic joints.
  Eigen::Vector3d point{Eigen::Vector3d::Zero()};
  double min_value = 0.0;
  double max_value = 0.0;
};

enum class BaseKind { nonholonomic, holonomic };

// Command channels: nonholonomic (v_x, omega_z), holonomic (v_x, v_y, omega_z).
struct BaseModel {
  BaseKind kind = BaseKind::nonholonomic;
  // Per-channel (min, max), in command order. Limits bracket zero.
  std::vector<std::pair<double, double>> velocity_limits{{-2.0, 2.0},
                                                         {-kPi, kPi}};

  int channels() const { return kind == BaseKind::holonomic ? 3 : 2; }
};

struct RobotModel {
  std::string name;
  BaseModel base;
  std::vector<JointModel> joints;
  Pose home_pose;  // end-effector pose at zero joint state, in the base frame
  Eigen::VectorXd initial_joint_values;  // bundled "ready" configuration

  int jointCount() const { return static_cast<int>(joints.size()); }
  int inputDimension() const { return base.channels() + jointCount(); }

  // Stacked box bounds in input order [base command; joint values].
  Eigen::VectorXd lowerBounds() const {
    Eigen::VectorXd lo(inputDimension());
    for (int c = 0; c < base.channels(); ++c) lo[c] = velocityLimit(c).first;
    for (int j = 0; j < jointCount(); ++j)
      lo[base.channels() + j] = joints[j].min_value;
    return lo;
  }

  Eigen::VectorXd upperBounds() const {
    Eigen::VectorXd hi(inputDimension());
    for (int c = 0; c < base.channels(); ++c) hi[c] = velocityLimit(c).second;
    for (int j = 0; j < jointCount(); ++j)
      hi[base.channels() + j] = joints[j].max_value;
    return hi;
  }

 private:
  std::pair<double, double> velocityLimit(int c) const {
    if (c >= static_cast<int>(base.velocity_limits.size())) {
      throw DimensionError("base velocity limits shorter than channel count");
    }
    return base.velocity_limits[c];
  }
};

// Base command plus joint values. The stacked order is [base; joints], with
// base channels leading (they are the leftmost exponential in the chain).
struct InputVector {
  Eigen::VectorXd base_command;
  Eigen::VectorXd joint_values;

  InputVector() = default;
  InputVector(Eigen::VectorXd base, Eigen::VectorXd joints)
      : base_command(std::move(base)), joint_values(std::move(joints)) {}

  static InputVector zeroMotion(const RobotModel& m,
                                const Eigen::VectorXd& joint_values) {
    return {Eigen::VectorXd::Zero(m.base.channels()), joint_values};
  }

  static InputVector fromStacked(const Eigen::VectorXd& u, int base_channels) {
    if (u.size() < base_channels) {
      throw DimensionError("stacked input shorter than base channel count");
    }
    return {u.head(base_channels), u.tail(u.size() - base_channels)};
  }

  Eigen::VectorXd stacked() const {
    Eigen::VectorXd u(dimension());
    u << base_command, joint_values;
    return u;
  }

  int dimension() const {
    return static_cast<int>(base_command.size() + joint_values.size());
  }
};

inline void checkInputDimension(const RobotModel& m, const InputVector& u) {
  if (u.base_command.size() != m.base.channels()
      || u.joint_values.size() != m.jointCount()) {
    throw DimensionError("input vector does not match model ("
                         + std::to_string(u.base_command.size()) + "+"
                         + std::to_string(u.joint_values.size()) + " vs "
                         + std::to_string(m.base.channels()) + "+"
                         + std::to_string(m.jointCount()) + ")");
  }
}

// Screw of joint j scaled by the joint value:
//   revolute:  (q axis, q (point x axis))
//   prismatic: (0, q axis)
inline Twist jointTwist(const JointModel& j, double q) {
  if (j.kind == JointKind::revolute) {
    return {q * j.axis, q * j.point.cross(j.axis)};
  }
  return {Eigen::Vector3d::Zero(), q * j.axis};
}

// Planar displacement twist of the base over one step. The exponential of
// this twist is the exact constant-twist arc the base drives during dt.
inline Twist baseTwist(const BaseModel& b, const Eigen::VectorXd& cmd,
                       double dt) {
  if (cmd.size() != b.channels()) {
    throw DimensionError("base command has " + std::to_string(cmd.size())
                         + " channels, model expects "
                         + std::to_string(b.channels()));
  }
  if (!(dt > 0.0)) {
    throw LimitError("baseTwist: dt must be positive");
  }
  for (int c = 0; c < b.channels(); ++c) {
    const auto [lo, hi] = b.velocity_limits[c];
    if (cmd[c] < lo || cmd[c] > hi) {
      throw LimitError("base command channel " + std::to_string(c) + " = "
                       + std::to_string(cmd[c]) + " outside ["
                       + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
  }
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  double yaw_rate;
  if (b.kind == BaseKind::nonholonomic) {
    v.x() = cmd[0] * dt;
    yaw_rate = cmd[1];
  } else {
    v.x() = cmd[0] * dt;
    v.y() = cmd[1] * dt;
    yaw_rate = cmd[2];
  }
  return {Eigen::Vector3d(0.0, 0.0, yaw_rate * dt), v};
}

// Product of exponentials along the chain, joint 1 outermost left factor:
//   fk(q) = prod_i exp(S_i q_i) * P0
inline Pose fkArm(const RobotModel& m, const Eigen::VectorXd& q) {
  if (q.size() != m.jointCount()) {
    throw DimensionError("fkArm: joint vector length "
                         + std::to_string(q.size()) + " vs "
                         + std::to_string(m.jointCount()) + " joints");
  }
  Pose p = Pose::Identity();
  for (int j = 0; j < m.jointCount(); ++j) {
    p = compose(p, expSe3(jointTwist(m.joints[j], q[j])));
  }
  return compose(p, m.home_pose);
}

// End-effector pose in the world frame one step ahead:
//   base_pose * exp(base twist) * fkArm(q)
inline Pose fkWithBase(const RobotModel& m, const Pose& base_pose,
                       const InputVector& u, double dt) {
  checkInputDimension(m, u);
  const Pose step = expSe3(baseTwist(m.base, u.base_command, dt));
  return compose(base_pose, compose(step, fkArm(m, u.joint_values)));
}

// Pose side of the inverse-kinematic constraint:
//   log( base_pose^-1 * desired * home^-1 )
inline Twist tauPoses(const Pose& base_pose, const Pose& desired,
                      const Pose& home) {
  const Pose arg = compose(inverse(base_pose), compose(desired, inverse(home)));
  try {
    return logSe3(arg);
  } catch (const LogDomainError&) {
    throw LogDomainError(
        "tauPoses: desired pose unreachable within one step's log chart");
  }
}

// Joint side of the inverse-kinematic constraint; the product excludes the
// home pose and the world projection:
//   log( exp(base twist) * prod_i exp(S_i q_i) )
inline Twist tauJoints(const RobotModel& m, const InputVector& u, double dt) {
  checkInputDimension(m, u);
  Pose p = expSe3(baseTwist(m.base, u.base_command, dt));
  for (int j = 0; j < m.jointCount(); ++j) {
    p = compose(p, expSe3(jointTwist(m.joints[j], u.joint_values[j])));
  }
  return logSe3(p);
}

// d(base twist)/d(command channel c), a constant twist per channel.
inline Twist baseTwistBasis(const BaseModel& b, int c, double dt) {
  Eigen::Vector3d w = Eigen::Vector3d::Zero();
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  const int yaw_channel = b.channels() - 1;
  if (c == yaw_channel) {
    w.z() = dt;
  } else if (c == 0) {
    v.x() = dt;
  } else {
    v.y() = dt;
  }
  return {w, v};
}

// Jacobian of tauJoints with respect to the stacked input, 6 x dim.
//
// Columns come from left-trivialized derivatives of the exponential chain:
// joint j contributes Ad_{prefix_j} S_j, a base channel contributes
// J_l(xi_base) dxi/dc, both pulled back through J_l^-1 at the log.
inline Eigen::Matrix<double, 6, Eigen::Dynamic> tauJointsJacobian(
    const RobotModel& m, const InputVector& u, double dt) {
  checkInputDimension(m, u);
  const int dim = m.inputDimension();
  const int nb = m.base.channels();
  Eigen::Matrix<double, 6, Eigen::Dynamic> spatial(6, dim);

  const Twist xi_base = baseTwist(m.base, u.base_command, dt);
  const Matrix6d jl_base = leftJacobianSe3(xi_base);
  for (int c = 0; c < nb; ++c) {
    spatial.col(c) = jl_base * baseTwistBasis(m.base, c, dt).vector();
  }

  Pose prefix = expSe3(xi_base);
  for (int j = 0; j < m.jointCount(); ++j) {
    const Twist unit = jointTwist(m.joints[j], 1.0);
    spatial.col(nb + j) = adjoint(prefix) * unit.vector();
    prefix = compose(prefix, expSe3(jointTwist(m.joints[j], u.joint_values[j])));
  }

  // prefix is now the full chain; pull the spatial columns back through the
  // inverse left Jacobian at tau = log(chain).
  const Twist tau = logSe3(prefix);
  return leftJacobianSe3Inverse(tau) * spatial;
}

}  // namespace slithers
