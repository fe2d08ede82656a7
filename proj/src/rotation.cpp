#include "handfit/rotation.hpp"

#include <cmath>
#include <numbers>

#include "handfit/errors.hpp"

namespace handfit {

namespace {

constexpr double kUnitTolerance = 1e-6;

void require_unit(const Eigen::Vector3d& axis, const char* what) {
  if (!axis.allFinite() || std::abs(axis.norm() - 1.0) > kUnitTolerance) {
    throw InputError(std::string(what) + ": axis must be unit length");
  }
}

}  // namespace

double normalize_angle(double radians) {
  constexpr double pi = std::numbers::pi;
  double a = std::remainder(radians, 2.0 * pi);  // [-pi, pi]
  if (a <= -pi) a += 2.0 * pi;
  return a;
}

Rotation::Rotation(const Eigen::Quaterniond& q) : q_(q.normalized()) {
  if (q_.w() < 0.0) q_.coeffs() = -q_.coeffs();
}

Rotation Rotation::from_quaternion(const Eigen::Quaterniond& q) {
  if (!q.coeffs().allFinite() || q.norm() == 0.0) {
    throw InputError("quaternion must be finite and non-zero");
  }
  return Rotation(q);
}

Rotation Rotation::from_axis_angle(const Eigen::Vector3d& axis, double angle) {
  require_unit(axis, "rotation_from_axis_angle");
  if (!std::isfinite(angle)) throw InputError("rotation_from_axis_angle: non-finite angle");
  const double half = 0.5 * normalize_angle(angle);
  const Eigen::Vector3d u = axis.normalized() * std::sin(half);
  return Rotation(Eigen::Quaterniond(std::cos(half), u.x(), u.y(), u.z()));
}

Rotation Rotation::from_rotation_vector(const Eigen::Vector3d& omega) {
  if (!omega.allFinite()) throw InputError("rotation vector must be finite");
  const double angle = omega.norm();
  if (angle < 1e-300) return Rotation();
  return from_axis_angle(omega / angle, angle);
}

Rotation Rotation::from_matrix(const Eigen::Matrix3d& m) {
  if (!m.allFinite() ||
      (m.transpose() * m - Eigen::Matrix3d::Identity()).norm() > kUnitTolerance ||
      m.determinant() <= 0.0) {
    throw InputError("matrix is not a proper rotation");
  }
  return Rotation(Eigen::Quaterniond(m));
}

AxisAngle Rotation::axis_angle() const {
  const Eigen::Vector3d v = q_.vec();
  const double s = v.norm();
  AxisAngle out;
  if (s < 1e-300) return out;
  out.axis = v / s;
  out.angle = 2.0 * std::atan2(s, q_.w());
  return out;
}

Eigen::Vector3d Rotation::rotation_vector() const {
  const AxisAngle aa = axis_angle();
  return aa.axis * aa.angle;
}

SwingTwist swing_twist_decompose(const Rotation& r, const Eigen::Vector3d& axis) {
  require_unit(axis, "swing_twist_decompose");
  const Eigen::Vector3d a = axis.normalized();
  const Eigen::Quaterniond& q = r.quaternion();
  const double p = q.vec().dot(a);
  const double n2 = q.w() * q.w() + p * p;
  if (n2 < 1e-24) {
    // r is a half turn about an axis perpendicular to `axis`.
    return {r, TwistAngle(0.0)};
  }
  const TwistAngle twist(2.0 * std::atan2(p, q.w()));
  const Eigen::Quaterniond tq(q.w(), p * a.x(), p * a.y(), p * a.z());
  const Rotation swing = Rotation::from_quaternion(q * tq.normalized().conjugate());
  return {swing, twist};
}

Rotation align_vectors(const Eigen::Vector3d& from, const Eigen::Vector3d& to) {
  const double nf = from.norm();
  const double nt = to.norm();
  if (!(nf > 1e-12) || !(nt > 1e-12) || !from.allFinite() || !to.allFinite()) {
    throw InputError("align_vectors: zero-length or non-finite input");
  }
  const Eigen::Vector3d f = from / nf;
  const Eigen::Vector3d t = to / nt;
  const double c = f.dot(t);
  if (1.0 + c < 1e-12) {
    int k = 0;
    f.cwiseAbs().minCoeff(&k);
    const Eigen::Vector3d axis = f.cross(Eigen::Vector3d::Unit(k)).normalized();
    return Rotation::from_axis_angle(axis, std::numbers::pi);
  }
  const Eigen::Vector3d cr = f.cross(t);
  return Rotation::from_quaternion(Eigen::Quaterniond(1.0 + c, cr.x(), cr.y(), cr.z()));
}

double rotation_distance(const Rotation& a, const Rotation& b) {
  return (a.matrix() - b.matrix()).norm();
}

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Eigen::Matrix3d so3_right_jacobian(const Eigen::Vector3d& omega) {
  const double theta = omega.norm();
  const Eigen::Matrix3d k = skew(omega);
  if (theta < 1e-8) {
    return Eigen::Matrix3d::Identity() - 0.5 * k + (1.0 / 6.0) * k * k;
  }
  const double t2 = theta * theta;
  return Eigen::Matrix3d::Identity() - (1.0 - std::cos(theta)) / t2 * k +
         (theta - std::sin(theta)) / (t2 * theta) * k * k;
}

}  // namespace handfit
