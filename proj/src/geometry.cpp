#include "isogap/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace isogap {

namespace {
constexpr double kOrthoTol = 1e-12;
}

Isometry::Isometry() : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}

Isometry::Isometry(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
  if (orthogonality_drift(rotation) > kOrthoTol) {
    throw std::invalid_argument("rotation matrix is not orthogonal within 1e-12");
  }
  if (rotation.determinant() < 0.0) {
    throw std::invalid_argument("rotation matrix must have determinant +1");
  }
}

Isometry Isometry::identity() { return Isometry(); }

Isometry Isometry::from_quaternion(double w, double x, double y, double z,
                                   const Vec3& translation) {
  double n = std::sqrt(w * w + x * x + y * y + z * z);
  if (n == 0.0) throw std::invalid_argument("zero quaternion");
  Eigen::Quaterniond q(w / n, x / n, y / n, z / n);
  return Isometry(q.toRotationMatrix(), translation);
}

Isometry Isometry::from_axis_angle(const Vec3& axis, double angle,
                                   const Vec3& translation) {
  double n = axis.norm();
  if (n == 0.0) throw std::invalid_argument("zero rotation axis");
  Eigen::AngleAxisd aa(angle, axis / n);
  return Isometry(aa.toRotationMatrix(), translation);
}

Isometry Isometry::translation_only(const Vec3& translation) {
  return Isometry(Mat3::Identity(), translation, Unchecked{});
}

Isometry Isometry::inverse() const {
  Mat3 rt = rotation_.transpose();
  return Isometry(rt, -(rt * translation_), Unchecked{});
}

Isometry compose(const Isometry& g, const Isometry& h) {
  Mat3 r = g.rotation_ * h.rotation_;
  if (orthogonality_drift(r) > kOrthoTol) r = polar_project(r);
  return Isometry(r, g.translation_ + g.rotation_ * h.translation_,
                  Isometry::Unchecked{});
}

double isometry_distance(const Isometry& g, const Isometry& h) {
  double dr = (g.rotation() - h.rotation()).cwiseAbs().maxCoeff();
  return dr + (g.translation() - h.translation()).norm();
}

Mat3 polar_project(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  Mat3 v = svd.matrixV();
  Mat3 r = u * v.transpose();
  if (r.determinant() < 0.0) {
    u.col(2) *= -1.0;
    r = u * v.transpose();
  }
  return r;
}

double orthogonality_drift(const Mat3& r) {
  return (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
}

double rotation_angle(const Mat3& r) {
  double c = 0.5 * (r.trace() - 1.0);
  return std::acos(std::min(1.0, std::max(-1.0, c)));
}

Mat3 rotation_between(const Vec3& a, const Vec3& b) {
  Vec3 u = a.normalized();
  Vec3 v = b.normalized();
  Vec3 axis = u.cross(v);
  double s = axis.norm();
  double c = u.dot(v);
  if (s < 1e-14) {
    if (c > 0.0) return Mat3::Identity();
    // Antiparallel: half turn about any axis orthogonal to u.
    Vec3 helper = std::abs(u.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    Vec3 w = u.cross(helper).normalized();
    return Eigen::AngleAxisd(M_PI, w).toRotationMatrix();
  }
  double angle = std::atan2(s, c);
  return Eigen::AngleAxisd(angle, axis / s).toRotationMatrix();
}

Mat3 rotation_z(double t) {
  Mat3 r;
  r << std::cos(t), -std::sin(t), 0.0, std::sin(t), std::cos(t), 0.0, 0.0, 0.0, 1.0;
  return r;
}

Mat3 rotation_y(double t) {
  Mat3 r;
  r << std::cos(t), 0.0, std::sin(t), 0.0, 1.0, 0.0, -std::sin(t), 0.0, std::cos(t);
  return r;
}

Mat3 rotation_x(double t) {
  Mat3 r;
  r << 1.0, 0.0, 0.0, 0.0, std::cos(t), -std::sin(t), 0.0, std::sin(t), std::cos(t);
  return r;
}

EulerZyz euler_zyz(const Mat3& r) {
  // With r = Rz(a) Ry(b) Rz(g):
  //   r(0,2) = cos a sin b,  r(1,2) = sin a sin b,  r(2,2) = cos b,
  //   r(2,0) = -sin b cos g, r(2,1) = sin b sin g.
  EulerZyz e{};
  double sb = std::hypot(r(0, 2), r(1, 2));
  e.beta = std::atan2(sb, r(2, 2));
  if (std::abs(r(2, 2)) > 1.0 - 1e-10) {
    e.gamma = 0.0;
    if (r(2, 2) > 0.0) {
      // r = Rz(alpha + gamma)
      e.beta = 0.0;
      e.alpha = std::atan2(r(1, 0), r(0, 0));
    } else {
      // r = Rz(alpha - gamma) Ry(pi)
      e.beta = M_PI;
      e.alpha = std::atan2(-r(1, 0), -r(0, 0));
    }
    return e;
  }
  e.alpha = std::atan2(r(1, 2), r(0, 2));
  e.gamma = std::atan2(r(2, 1), -r(2, 0));
  return e;
}

Mat3 from_euler_zyz(const EulerZyz& e) {
  return rotation_z(e.alpha) * rotation_y(e.beta) * rotation_z(e.gamma);
}

Mat3 random_rotation(Rng& rng) {
  // Uniform quaternion from four normals.
  double w = rng.normal(), x = rng.normal(), y = rng.normal(), z = rng.normal();
  double n = std::sqrt(w * w + x * x + y * y + z * z);
  if (n == 0.0) return Mat3::Identity();
  Eigen::Quaterniond q(w / n, x / n, y / n, z / n);
  return q.toRotationMatrix();
}

Vec3 random_unit_vector(Rng& rng) {
  Vec3 v(rng.normal(), rng.normal(), rng.normal());
  double n = v.norm();
  if (n == 0.0) return Vec3::UnitZ();
  return v / n;
}

}  // namespace isogap
