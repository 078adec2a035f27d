#pragma once

// SE(3)/SO(3) manifold arithmetic on twists and poses: hat/vee, closed-form
// exponential and logarithm, composition, and the left Jacobians used to
// differentiate through the log map.
//
// Conventions:
//   - A twist stacks as [omega; v] (rotation block first).
//   - hat([omega; v]) = [ [omega]x  v ]
//                       [    0     0 ]
//   - exp/log use the principal branch; log rejects rotations within
//     kLogAngleMargin of pi instead of picking a branch.

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <string>

#include "slithers/constants.hpp"
#include "slithers/errors.hpp"

namespace slithers {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

// Screw coordinates (omega, v). A twist scaled by a joint value is still a
// twist; no normalization is implied.
struct Twist {
  Eigen::Vector3d angular{Eigen::Vector3d::Zero()};
  Eigen::Vector3d linear{Eigen::Vector3d::Zero()};

  Twist() = default;
  Twist(const Eigen::Vector3d& angular_part, const Eigen::Vector3d& linear_part)
      : angular(angular_part), linear(linear_part) {}

  static Twist Zero() { return {}; }

  static Twist fromVector(const Vector6d& xi) {
    return {xi.head<3>(), xi.tail<3>()};
  }

  Vector6d vector() const {
    Vector6d xi;
    xi << angular, linear;
    return xi;
  }
};

// Rigid transform in SE(3) stored as rotation matrix + translation. The
// implied homogeneous form has bottom row (0, 0, 0, 1).
struct Pose {
  Eigen::Matrix3d rotation{Eigen::Matrix3d::Identity()};
  Eigen::Vector3d translation{Eigen::Vector3d::Zero()};

  Pose() = default;
  Pose(const Eigen::Matrix3d& rot, const Eigen::Vector3d& trans)
      : rotation(rot), translation(trans) {}

  static Pose Identity() { return {}; }

  Eigen::Matrix4d matrix() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = rotation;
    m.topRightCorner<3, 1>() = translation;
    return m;
  }

  static Pose fromMatrix(const Eigen::Matrix4d& m) {
    return {m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>()};
  }
};

inline Eigen::Matrix3d skew(const Eigen::Vector3d& w) {
  Eigen::Matrix3d s;
  s << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
       -w.y(), w.x(), 0.0;
  return s;
}

inline Eigen::Vector3d unskew(const Eigen::Matrix3d& s) {
  return {s(2, 1), s(0, 2), s(1, 0)};
}

inline bool isValidPose(const Pose& p, double tol = kStructuralTol) {
  const Eigen::Matrix3d ortho = p.rotation.transpose() * p.rotation
                                - Eigen::Matrix3d::Identity();
  return ortho.norm() <= tol
         && std::abs(p.rotation.determinant() - 1.0) <= tol
         && p.translation.allFinite();
}

inline Eigen::Matrix4d hat(const Twist& t) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m.topLeftCorner<3, 3>() = skew(t.angular);
  m.topRightCorner<3, 1>() = t.linear;
  return m;
}

// Inverse of hat. Rejects matrices without the se(3) shape: the top-left
// block must be antisymmetric and the bottom row zero, within tol.
inline Twist vee(const Eigen::Matrix4d& m, double tol = kStructuralTol) {
  const Eigen::Matrix3d sym = m.topLeftCorner<3, 3>()
                              + m.topLeftCorner<3, 3>().transpose();
  if (sym.norm() > tol) {
    throw StructureError("vee: top-left block is not antisymmetric (|M+M^T| = "
                         + std::to_string(sym.norm()) + ")");
  }
  if (m.row(3).norm() > tol) {
    throw StructureError("vee: bottom row is not zero");
  }
  return {unskew(m.topLeftCorner<3, 3>()), m.topRightCorner<3, 1>()};
}

namespace detail {

// Coefficients of the Rodrigues expansion, with Taylor branches below
// kSmallAngle: a = sin t / t, b = (1 - cos t) / t^2, c = (t - sin t) / t^3.
struct RodriguesCoeffs {
  double a, b, c;
};

inline RodriguesCoeffs rodriguesCoeffs(double theta) {
  RodriguesCoeffs k{};
  const double t2 = theta * theta;
  if (theta < kSmallAngle) {
    k.a = 1.0 - t2 / 6.0;
    k.b = 0.5 - t2 / 24.0;
    k.c = 1.0 / 6.0 - t2 / 120.0;
  } else {
    k.a = std::sin(theta) / theta;
    k.b = (1.0 - std::cos(theta)) / t2;
    k.c = (theta - std::sin(theta)) / (t2 * theta);
  }
  return k;
}

}  // namespace detail

inline Eigen::Matrix3d expSo3(const Eigen::Vector3d& omega) {
  const double theta = omega.norm();
  const auto k = detail::rodriguesCoeffs(theta);
  const Eigen::Matrix3d wx = skew(omega);
  return Eigen::Matrix3d::Identity() + k.a * wx + k.b * wx * wx;
}

// Left Jacobian of SO(3); also the V matrix mapping the twist's linear part
// to the exponential's translation.
inline Eigen::Matrix3d leftJacobianSo3(const Eigen::Vector3d& omega) {
  const double theta = omega.norm();
  const auto k = detail::rodriguesCoeffs(theta);
  const Eigen::Matrix3d wx = skew(omega);
  return Eigen::Matrix3d::Identity() + k.b * wx + k.c * wx * wx;
}

inline Eigen::Matrix3d leftJacobianSo3Inverse(const Eigen::Vector3d& omega) {
  const double theta = omega.norm();
  const Eigen::Matrix3d wx = skew(omega);
  double c;  // (1/t^2) (1 - (t/2) cot(t/2))
  if (theta < kSmallAngle) {
    c = 1.0 / 12.0 + theta * theta / 720.0;
  } else {
    c = (1.0 - 0.5 * theta * std::sin(theta) / (1.0 - std::cos(theta)))
        / (theta * theta);
  }
  return Eigen::Matrix3d::Identity() - 0.5 * wx + c * wx * wx;
}

// Principal rotation angle of R, in [0, pi].
inline double so3Angle(const Eigen::Matrix3d& r) {
  const double c = std::clamp(0.5 * (r.trace() - 1.0), -1.0, 1.0);
  return std::acos(c);
}

// Principal logarithm of SO(3). Throws LogDomainError within kLogAngleMargin
// of the pi branch cut. Returned vector has norm <= pi.
inline Eigen::Vector3d logSo3(const Eigen::Matrix3d& r) {
  const double theta = so3Angle(r);
  if (theta > kPi - kLogAngleMargin) {
    throw LogDomainError("logSo3: rotation angle " + std::to_string(theta)
                         + " within margin of pi");
  }
  const Eigen::Vector3d w = 0.5 * unskew(r - r.transpose());  // sin(t) * axis
  if (theta < kSmallAngle) {
    // theta / sin(theta) ~ 1 + t^2/6
    return (1.0 + theta * theta / 6.0) * w;
  }
  if (theta > 2.8) {
    // sin(theta) is small; recover the axis from the symmetric part, which
    // stays well conditioned up to pi. n n^T = (R_sym - cos(t) I)/(1 - cos(t)).
    const double ct = std::cos(theta);
    const Eigen::Matrix3d nnt =
        (0.5 * (r + r.transpose()) - ct * Eigen::Matrix3d::Identity())
        / (1.0 - ct);
    int i;
    nnt.diagonal().maxCoeff(&i);
    Eigen::Vector3d n = nnt.col(i) / std::sqrt(nnt(i, i));
    if (n.dot(w) < 0.0) n = -n;
    return theta * n;
  }
  return (theta / std::sin(theta)) * w;
}

// Closed-form exponential: Rodrigues on the angular part, translation via the
// V matrix (SO(3) left Jacobian) acting on the linear part.
inline Pose expSe3(const Twist& t) {
  return {expSo3(t.angular), leftJacobianSo3(t.angular) * t.linear};
}

// Principal logarithm of SE(3). expSe3(logSe3(p)) == p within kStructuralTol
// for rotation angles below pi - kLogAngleMargin.
inline Twist logSe3(const Pose& p) {
  Eigen::Vector3d omega;
  try {
    omega = logSo3(p.rotation);
  } catch (const LogDomainError&) {
    throw LogDomainError("logSe3: rotation angle within margin of pi");
  }
  return {omega, leftJacobianSo3Inverse(omega) * p.translation};
}

inline Pose compose(const Pose& a, const Pose& b) {
  return {a.rotation * b.rotation, a.rotation * b.translation + a.translation};
}

inline Pose inverse(const Pose& p) {
  const Eigen::Matrix3d rt = p.rotation.transpose();
  return {rt, -(rt * p.translation)};
}

// Geodesic angle between the two orientations, in [0, pi].
inline double rotationAngle(const Pose& a, const Pose& b) {
  return so3Angle(a.rotation.transpose() * b.rotation);
}

// Adjoint of a pose acting on [omega; v] twists:
//   Ad_T (w, v) = (R w, [t]x R w + R v).
inline Matrix6d adjoint(const Pose& p) {
  Matrix6d ad = Matrix6d::Zero();
  ad.topLeftCorner<3, 3>() = p.rotation;
  ad.bottomLeftCorner<3, 3>() = skew(p.translation) * p.rotation;
  ad.bottomRightCorner<3, 3>() = p.rotation;
  return ad;
}

namespace detail {

// Off-diagonal block of the SE(3) left Jacobian (the coupling of a rotation
// perturbation into translation). Closed form with Taylor branches.
inline Eigen::Matrix3d leftJacobianSe3Block(const Eigen::Vector3d& omega,
                                            const Eigen::Vector3d& v) {
  const double theta = omega.norm();
  const double t2 = theta * theta;
  double c1, c2, c3;  // (t-sin t)/t^3, (1 - t^2/2 - cos t)/t^4, and their mix
  if (theta < 0.1) {
    // The closed forms below lose ~eps/theta^4 to cancellation; the series
    // with t^4 terms is accurate to ~1e-12 at the seam.
    const double t4 = t2 * t2;
    c1 = 1.0 / 6.0 - t2 / 120.0 + t4 / 5040.0;
    c2 = -1.0 / 24.0 + t2 / 720.0 - t4 / 40320.0;
    const double b = -1.0 / 120.0 + t2 / 5040.0 - t4 / 362880.0;
    c3 = 0.5 * (c2 - 3.0 * b);
  } else {
    const double t4 = t2 * t2;
    c1 = (theta - std::sin(theta)) / (t2 * theta);
    c2 = (1.0 - 0.5 * t2 - std::cos(theta)) / t4;
    c3 = 0.5 * (c2 - 3.0 * (theta - std::sin(theta) - t2 * theta / 6.0)
                         / (t4 * theta));
  }
  const Eigen::Matrix3d wx = skew(omega);
  const Eigen::Matrix3d vx = skew(v);
  const Eigen::Matrix3d wvw = wx * vx * wx;
  return 0.5 * vx + c1 * (wx * vx + vx * wx + wvw)
         - c2 * (wx * wx * vx + vx * wx * wx - 3.0 * wvw)
         - c3 * (wvw * wx + wx * wvw);
}

}  // namespace detail

// Left Jacobian of SE(3) for the [omega; v] ordering:
//   J_l = [ J_so3   0    ]
//         [ Q       J_so3]
// with exp((xi + d)^) ~ exp((J_l(xi) d)^) exp(xi^) to first order.
inline Matrix6d leftJacobianSe3(const Twist& xi) {
  const Eigen::Matrix3d j = leftJacobianSo3(xi.angular);
  Matrix6d out = Matrix6d::Zero();
  out.topLeftCorner<3, 3>() = j;
  out.bottomRightCorner<3, 3>() = j;
  out.bottomLeftCorner<3, 3>() = detail::leftJacobianSe3Block(xi.angular, xi.linear);
  return out;
}

inline Matrix6d leftJacobianSe3Inverse(const Twist& xi) {
  const Eigen::Matrix3d jinv = leftJacobianSo3Inverse(xi.angular);
  const Eigen::Matrix3d q = detail::leftJacobianSe3Block(xi.angular, xi.linear);
  Matrix6d out = Matrix6d::Zero();
  out.topLeftCorner<3, 3>() = jinv;
  out.bottomRightCorner<3, 3>() = jinv;
  out.bottomLeftCorner<3, 3>() = -jinv * q * jinv;
  return out;
}

}  // namespace slithers
