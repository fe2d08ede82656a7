#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace handfit {

/// Wraps an angle into (-pi, pi].
double normalize_angle(double radians);

/// A twist angle about a known bone axis, kept in (-pi, pi].
class TwistAngle {
 public:
  TwistAngle() = default;
  explicit TwistAngle(double radians) : radians_(normalize_angle(radians)) {}

  double radians() const noexcept { return radians_; }

  friend bool operator==(const TwistAngle&, const TwistAngle&) = default;

 private:
  double radians_ = 0.0;
};

struct AxisAngle {
  Eigen::Vector3d axis = Eigen::Vector3d::UnitX();
  double angle = 0.0;  // [0, pi]
};

/// Proper 3D rotation stored as a unit quaternion with non-negative w.
class Rotation {
 public:
  Rotation() = default;

  static Rotation identity() { return Rotation(); }

  /// Rodrigues construction. Throws InputError unless |axis| is within 1e-6 of 1.
  static Rotation from_axis_angle(const Eigen::Vector3d& axis, double angle);

  /// Rotation vector (axis * angle); any finite vector is accepted.
  static Rotation from_rotation_vector(const Eigen::Vector3d& omega);

  /// Throws InputError when m is not orthonormal with det +1 (tolerance 1e-6).
  static Rotation from_matrix(const Eigen::Matrix3d& m);

  static Rotation from_quaternion(const Eigen::Quaterniond& q);

  Eigen::Matrix3d matrix() const { return q_.toRotationMatrix(); }
  const Eigen::Quaterniond& quaternion() const noexcept { return q_; }
  AxisAngle axis_angle() const;
  Eigen::Vector3d rotation_vector() const;
  double angle() const { return axis_angle().angle; }

  Rotation inverse() const { return from_quaternion(q_.conjugate()); }
  Eigen::Vector3d operator*(const Eigen::Vector3d& v) const { return q_ * v; }

  /// (a * b) applies b first.
  friend Rotation operator*(const Rotation& a, const Rotation& b) {
    return from_quaternion(a.q_ * b.q_);
  }

 private:
  explicit Rotation(const Eigen::Quaterniond& q);
  Eigen::Quaterniond q_ = Eigen::Quaterniond::Identity();
};

struct SwingTwist {
  Rotation swing;
  TwistAngle twist;
};

/// Factors r = swing * twist(axis). When r maps axis to -axis the twist is
/// taken as zero and swing = r.
SwingTwist swing_twist_decompose(const Rotation& r, const Eigen::Vector3d& axis);

/// Minimal rotation taking direction `from` onto direction `to`. For
/// antiparallel input the axis is from x e_k, e_k being the basis vector of
/// from's smallest-magnitude component.
Rotation align_vectors(const Eigen::Vector3d& from, const Eigen::Vector3d& to);

/// Frobenius norm of the difference between the two rotation matrices.
double rotation_distance(const Rotation& a, const Rotation& b);

/// Skew-symmetric cross-product matrix.
Eigen::Matrix3d skew(const Eigen::Vector3d& v);

/// Right Jacobian of the exponential map at rotation vector omega.
Eigen::Matrix3d so3_right_jacobian(const Eigen::Vector3d& omega);

}  // namespace handfit
