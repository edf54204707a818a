#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "hybrik/errors.hpp"

namespace hybrik {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Vectors shorter than this (mm) cannot define a direction.
inline constexpr double kZeroLengthTol = 1e-12;
// ‖t x p‖ < kDegenerateSwingTol * ‖t‖ * ‖p‖ routes swing construction through
// the parallel / anti-parallel branches.
inline constexpr double kDegenerateSwingTol = 1e-9;
// Per-entry orthonormality and determinant tolerance of validated rotations.
inline constexpr double kRotationTol = 1e-8;

/// Cross-product matrix: skew(v) * u == v x u.
Mat3 skew(const Vec3& v);

/// Proper orthonormal 3x3 matrix. Composition and inversion stay inside the
/// group; validation happens in from_matrix.
class Rotation {
public:
    Rotation() : m_(Mat3::Identity()) {}

    /// Checks orthonormality and det = +1 within kRotationTol; throws
    /// InvalidRotation otherwise.
    static Rotation from_matrix(const Mat3& m);
    /// Wraps a matrix the caller guarantees to be a proper rotation.
    static Rotation from_matrix_unchecked(const Mat3& m) { return Rotation(m); }
    static Rotation identity() { return Rotation(); }

    const Mat3& matrix() const { return m_; }
    Rotation inverse() const { return Rotation(m_.transpose()); }
    Vec3 operator*(const Vec3& v) const { return m_ * v; }
    Rotation operator*(const Rotation& rhs) const { return Rotation(m_ * rhs.m_); }

    bool is_orthonormal(double tol = kRotationTol) const;

private:
    explicit Rotation(const Mat3& m) : m_(m) {}
    Mat3 m_;
};

/// Twist angle stored canonically as a normalized (cos, sin) pair.
class TwistAngle {
public:
    TwistAngle() = default;  // zero angle

    static TwistAngle from_angle(double radians);
    /// Renormalizes when c^2 + s^2 lands in [0.5, 2]; throws DegeneratePair
    /// outside that band (garbage input).
    static TwistAngle from_pair(double c, double s);

    double cosine() const { return c_; }
    double sine() const { return s_; }
    /// Angle in (-pi, pi].
    double angle() const;

private:
    double c_ = 1.0;
    double s_ = 0.0;
};

/// Rotation of `angle_rad` about a unit axis. Throws NonUnitAxis when the
/// axis norm deviates from 1 by more than 1e-9.
Rotation rodrigues(const Vec3& unit_axis, double angle_rad);

/// Minimal rotation carrying direction t onto direction p. Parallel inputs
/// give the identity; anti-parallel inputs rotate pi about a deterministic
/// perpendicular axis (t x e_i with the basis axis of smallest |t_i|).
Rotation swing_between(const Vec3& t, const Vec3& p);

/// True when (t, p) would take the parallel / anti-parallel branch.
bool swing_is_degenerate(const Vec3& t, const Vec3& p);

/// Rotation by phi about t itself; the norm of t is irrelevant. Positive phi
/// is right-handed about t.
Rotation twist_about(const Vec3& t, const TwistAngle& phi);

/// swing_between(t, p) * twist_about(t, phi). The result carries t onto the
/// direction of p since the twist fixes t.
Rotation compose_twist_swing(const Vec3& t, const Vec3& p, const TwistAngle& phi);

struct TwistSwing {
    Rotation swing;
    TwistAngle twist;
};

/// Splits r into swing * twist with the twist taken about t, inverting
/// compose_twist_swing. The swing is swing_between(t, r*t); the twist is the
/// signed residual rotation about t.
TwistSwing extract_twist_swing(const Rotation& r, const Vec3& t);

}  // namespace hybrik
