#pragma once

#include <numbers>

namespace slithers {

inline constexpr double kPi = std::numbers::pi;

// Structural checks: rotation orthonormality, det(R) = 1, hat/vee algebra shape.
inline constexpr double kStructuralTol = 1e-9;

// Group identities that hold to machine precision, e.g. compose(p, inverse(p)).
inline constexpr double kComposeTol = 1e-12;

// Below this rotation magnitude the Rodrigues / V-matrix coefficients switch to
// their Taylor branches (sin t / t and friends cancel catastrophically).
inline constexpr double kSmallAngle = 1e-5;

// log_se3 rejects rotations within this margin of the pi branch cut.
inline constexpr double kLogAngleMargin = 1e-6;

}  // namespace slithers
