#include "hybrik/rotmath.hpp"

#include <cmath>
#include <numbers>

namespace hybrik {

Mat3 skew(const Vec3& v) {
    Mat3 m;
    // clang-format off
    m <<      0.0, -v.z(),  v.y(),
            v.z(),    0.0, -v.x(),
           -v.y(),  v.x(),    0.0;
    // clang-format on
    return m;
}

bool Rotation::is_orthonormal(double tol) const {
    const Mat3 gram = m_.transpose() * m_;
    if (((gram - Mat3::Identity()).array().abs() > tol).any()) {
        return false;
    }
    return std::abs(m_.determinant() - 1.0) <= tol;
}

Rotation Rotation::from_matrix(const Mat3& m) {
    Rotation r(m);
    if (!r.is_orthonormal()) {
        throw InvalidRotation("matrix is not a proper rotation");
    }
    return r;
}

TwistAngle TwistAngle::from_angle(double radians) {
    if (!std::isfinite(radians)) {
        throw ValidationError("twist angle must be finite");
    }
    TwistAngle t;
    t.c_ = std::cos(radians);
    t.s_ = std::sin(radians);
    return t;
}

TwistAngle TwistAngle::from_pair(double c, double s) {
    const double n2 = c * c + s * s;
    if (!(n2 >= 0.5 && n2 <= 2.0)) {
        throw DegeneratePair("(cos, sin) norm^2 = " + std::to_string(n2) +
                             " outside [0.5, 2]");
    }
    const double inv = 1.0 / std::sqrt(n2);
    TwistAngle t;
    t.c_ = c * inv;
    t.s_ = s * inv;
    return t;
}

double TwistAngle::angle() const {
    const double a = std::atan2(s_, c_);
    // atan2(-0.0, c < 0) lands on -pi; fold it onto +pi.
    return a <= -std::numbers::pi ? std::numbers::pi : a;
}

Rotation rodrigues(const Vec3& unit_axis, double angle_rad) {
    if (std::abs(unit_axis.norm() - 1.0) > 1e-9) {
        throw NonUnitAxis("rodrigues: axis norm " + std::to_string(unit_axis.norm()));
    }
    const Mat3 k = skew(unit_axis);
    const Mat3 m = Mat3::Identity() + std::sin(angle_rad) * k +
                   (1.0 - std::cos(angle_rad)) * (k * k);
    return Rotation::from_matrix_unchecked(m);
}

namespace {

// Unit vector perpendicular to t: cross with the basis axis of smallest |t_i|.
Vec3 perpendicular_axis(const Vec3& t) {
    int smallest = 0;
    if (std::abs(t.y()) < std::abs(t[smallest])) smallest = 1;
    if (std::abs(t.z()) < std::abs(t[smallest])) smallest = 2;
    Vec3 e = Vec3::Zero();
    e[smallest] = 1.0;
    return t.cross(e).normalized();
}

void require_nonzero(const Vec3& v, const char* who) {
    if (v.norm() < kZeroLengthTol) {
        throw ZeroLengthVector(std::string(who) + ": zero-length vector");
    }
}

}  // namespace

bool swing_is_degenerate(const Vec3& t, const Vec3& p) {
    return t.cross(p).norm() < kDegenerateSwingTol * t.norm() * p.norm();
}

Rotation swing_between(const Vec3& t, const Vec3& p) {
    require_nonzero(t, "swing_between");
    require_nonzero(p, "swing_between");
    const Vec3 cr = t.cross(p);
    const double ncr = cr.norm();
    const double nt = t.norm();
    const double np = p.norm();
    if (ncr < kDegenerateSwingTol * nt * np) {
        if (t.dot(p) > 0.0) {
            return Rotation::identity();
        }
        return rodrigues(perpendicular_axis(t), std::numbers::pi);
    }
    const Vec3 axis = cr / ncr;
    const double cos_a = t.dot(p) / (nt * np);
    const double sin_a = ncr / (nt * np);
    const Mat3 k = skew(axis);
    const Mat3 m = Mat3::Identity() + sin_a * k + (1.0 - cos_a) * (k * k);
    return Rotation::from_matrix_unchecked(m);
}

Rotation twist_about(const Vec3& t, const TwistAngle& phi) {
    require_nonzero(t, "twist_about");
    const double nt = t.norm();
    const Mat3 k = skew(t);
    const Mat3 m = Mat3::Identity() + (phi.sine() / nt) * k +
                   ((1.0 - phi.cosine()) / (nt * nt)) * (k * k);
    return Rotation::from_matrix_unchecked(m);
}

Rotation compose_twist_swing(const Vec3& t, const Vec3& p, const TwistAngle& phi) {
    return swing_between(t, p) * twist_about(t, phi);
}

TwistSwing extract_twist_swing(const Rotation& r, const Vec3& t) {
    require_nonzero(t, "extract_twist_swing");
    const Rotation swing = swing_between(t, r * t);
    // The residual fixes t by construction, so it is a pure twist about t.
    const Mat3 tw = (swing.inverse() * r).matrix();
    const Vec3 axis = t.normalized();
    const double c = 0.5 * (tw.trace() - 1.0);
    const Vec3 axial(tw(2, 1) - tw(1, 2), tw(0, 2) - tw(2, 0), tw(1, 0) - tw(0, 1));
    const double s = 0.5 * axial.dot(axis);
    return {swing, TwistAngle::from_pair(c, s)};
}

}  // namespace hybrik
