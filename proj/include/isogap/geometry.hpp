#pragma once

#include <Eigen/Dense>

#include "isogap/rng.hpp"

namespace isogap {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Orientation-preserving rigid motion of R^3, stored as a rotation matrix
// and a translation vector: g(x) = rotation * x + translation.
//
// Group law: (v1, R1)(v2, R2) = (v1 + R1 v2, R1 R2), i.e. composition of
// maps, and g^-1 = (-R^T v, R^T).
class Isometry {
public:
  // Identity.
  Isometry();

  // Throws std::invalid_argument unless R is orthogonal within 1e-12
  // (max-norm of R^T R - I) with det R > 0.
  Isometry(const Mat3& rotation, const Vec3& translation);

  static Isometry identity();
  static Isometry from_quaternion(double w, double x, double y, double z,
                                  const Vec3& translation);
  static Isometry from_axis_angle(const Vec3& axis, double angle,
                                  const Vec3& translation);
  static Isometry translation_only(const Vec3& translation);

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }

  Vec3 apply(const Vec3& x) const { return rotation_ * x + translation_; }
  Vec3 operator()(const Vec3& x) const { return apply(x); }

  Isometry inverse() const;

  // Composition re-orthonormalizes by polar projection when the rotation
  // product drifts beyond 1e-12, so long products stay on the group.
  friend Isometry compose(const Isometry& g, const Isometry& h);
  friend Isometry operator*(const Isometry& g, const Isometry& h) {
    return compose(g, h);
  }

private:
  struct Unchecked {};
  Isometry(const Mat3& rotation, const Vec3& translation, Unchecked)
      : rotation_(rotation), translation_(translation) {}

  Mat3 rotation_;
  Vec3 translation_;
};

Isometry compose(const Isometry& g, const Isometry& h);

// Distance used for atom merging and set comparison:
// max-norm of the rotation difference plus Euclidean translation distance.
double isometry_distance(const Isometry& g, const Isometry& h);

// Nearest rotation matrix in Frobenius norm (polar factor).
Mat3 polar_project(const Mat3& m);

// Max-norm of R^T R - I.
double orthogonality_drift(const Mat3& r);

// Rotation angle in [0, pi] recovered from the trace.
double rotation_angle(const Mat3& r);

// Rotation taking unit direction a/|a| to b/|b| (|a| = |b| required by
// callers; only directions are used).  Degenerate antiparallel input gets
// a half-turn about a stable orthogonal axis.
Mat3 rotation_between(const Vec3& a, const Vec3& b);

Mat3 rotation_z(double angle);
Mat3 rotation_y(double angle);
Mat3 rotation_x(double angle);

// Z-Y-Z Euler factorization r = Rz(alpha) Ry(beta) Rz(gamma) with
// beta in [0, pi].  Near the gimbal branch |cos beta| > 1 - 1e-10 the
// remaining freedom is resolved by gamma = 0.
struct EulerZyz {
  double alpha;
  double beta;
  double gamma;
};
EulerZyz euler_zyz(const Mat3& r);
Mat3 from_euler_zyz(const EulerZyz& e);

// Haar-ish random rotation (uniform quaternion) and unit vector; used for
// seeded tests and probe directions.
Mat3 random_rotation(Rng& rng);
Vec3 random_unit_vector(Rng& rng);

}  // namespace isogap
