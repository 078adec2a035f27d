#pragma once

// Closed-form test paths sampled into full SE(3) waypoint lists. All three
// analytic kinds have non-zero derivatives along their whole length.
//
// Orientation rule: the frame's x axis is the unit tangent, z is world-up
// orthogonalized against the tangent (Gram-Schmidt), y completes the
// right-handed frame. If the tangent is parallel to world-up, world-x is the
// secondary reference instead.

#include <Eigen/Core>

#include <cmath>
#include <string>
#include <vector>

#include "slithers/errors.hpp"
#include "slithers/liegroup.hpp"

namespace slithers {

enum class PathKind { vertical_helix, sine_wave, horizontal_helix, waypoints };

struct PathParams {
  PathKind kind = PathKind::vertical_helix;
  std::string name;

  // vertical_helix: circle of `radius` around the origin z axis, `turns`
  // revolutions over the duration, climbing `rise` meters in total.
  double radius = 0.5;
  double turns = 1.0;
  double rise = 1.0;

  // sine_wave: forward along x at `forward_speed`, lateral y oscillation of
  // `amplitude` with temporal `period`, constant `height`.
  double forward_speed = 0.15;
  double amplitude = 0.5;
  double period = 10.0;
  double height = 0.5;
  // horizontal_helix reuses forward_speed/radius/height/turns: forward along
  // x while circling in the y-z plane around height `height`.

  Pose origin;  // world placement applied to every sample
  double dt = 0.2;
  double duration = 20.0;

  // kind == waypoints: explicit samples, already in the world frame.
  std::vector<Pose> waypoint_poses;
};

struct DesiredPath {
  std::vector<Pose> samples;
  double dt = 0.2;
  double duration = 0.0;
  std::string name;
};

namespace detail {

inline Pose frameFromTangent(const Eigen::Vector3d& position,
                             const Eigen::Vector3d& tangent) {
  const Eigen::Vector3d x = tangent.normalized();
  Eigen::Vector3d up = Eigen::Vector3d::UnitZ();
  if (std::abs(x.dot(up)) > 1.0 - 1e-9) {
    up = Eigen::Vector3d::UnitX();  // degenerate: fall back to world-x
  }
  const Eigen::Vector3d z = (up - x.dot(up) * x).normalized();
  const Eigen::Vector3d y = z.cross(x);
  Eigen::Matrix3d r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = z;
  return {r, position};
}

}  // namespace detail

// Closed-form pose at time t (analytic kinds only). C^2 in t on (0, duration).
inline Pose evaluate(const PathParams& p, double t) {
  // Slack of 1e-9 so t = k*dt lands inside even when k*dt rounds a few ulp
  // past the duration.
  if (t < 0.0 || t > p.duration + 1e-9) {
    throw LimitError("path evaluated outside [0, duration]");
  }
  Eigen::Vector3d position;
  Eigen::Vector3d tangent;
  switch (p.kind) {
    case PathKind::vertical_helix: {
      const double w = 2.0 * kPi * p.turns / p.duration;
      const double climb = p.rise / p.duration;
      position = {p.radius * std::cos(w * t), p.radius * std::sin(w * t),
                  climb * t};
      tangent = {-p.radius * w * std::sin(w * t), p.radius * w * std::cos(w * t),
                 climb};
      break;
    }
    case PathKind::sine_wave: {
      const double w = 2.0 * kPi / p.period;
      position = {p.forward_speed * t, p.amplitude * std::sin(w * t), p.height};
      tangent = {p.forward_speed, p.amplitude * w * std::cos(w * t), 0.0};
      break;
    }
    case PathKind::horizontal_helix: {
      const double w = 2.0 * kPi * p.turns / p.duration;
      position = {p.forward_speed * t, p.radius * std::cos(w * t),
                  p.height + p.radius * std::sin(w * t)};
      tangent = {p.forward_speed, -p.radius * w * std::sin(w * t),
                 p.radius * w * std::cos(w * t)};
      break;
    }
    case PathKind::waypoints:
      throw LimitError("waypoint paths have no closed form; use sample()");
  }
  return compose(p.origin, detail::frameFromTangent(position, tangent));
}

// Uniform samples at t = 0, dt, ..., duration (floor(duration/dt) + 1 poses).
inline DesiredPath sample(const PathParams& p, double dt, double duration) {
  if (!(dt > 0.0) || duration < dt) {
    throw LimitError("sample: need dt > 0 and duration >= dt");
  }
  DesiredPath path;
  path.dt = dt;
  path.duration = duration;
  path.name = p.name;
  if (p.kind == PathKind::waypoints) {
    path.samples = p.waypoint_poses;
    return path;
  }
  // floor(duration/dt) + 1 samples, with an epsilon so an exact multiple
  // that rounds just below (20/0.2 -> 99.999...) still counts fully.
  const int count = static_cast<int>(std::floor(duration / dt + 1e-9)) + 1;
  path.samples.reserve(count);
  for (int k = 0; k < count; ++k) {
    path.samples.push_back(evaluate(p, k * dt));
  }
  return path;
}

inline DesiredPath sample(const PathParams& p) {
  return sample(p, p.dt, p.duration);
}

// Largest gap between consecutive sample positions; the caller checks it
// against what the platform can cover in one dt.
inline double maxConsecutiveSpacing(const DesiredPath& path) {
  double worst = 0.0;
  for (std::size_t k = 1; k < path.samples.size(); ++k) {
    worst = std::max(worst, (path.samples[k].translation
                             - path.samples[k - 1].translation)
                                .norm());
  }
  return worst;
}

}  // namespace slithers
