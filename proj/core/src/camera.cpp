#include "mca/camera.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mca {

namespace {

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

}  // namespace

void CameraCalibration::validate() const {
  if (K(1, 0) != 0.0 || K(2, 0) != 0.0 || K(2, 1) != 0.0) {
    throw std::invalid_argument("camera matrix is not upper-triangular");
  }
  if (K(2, 2) != 1.0) {
    throw std::invalid_argument("camera matrix K(2,2) must be 1");
  }
  if (!(K(0, 0) > 0.0) || !(K(1, 1) > 0.0)) {
    throw std::invalid_argument("camera focal lengths must be positive");
  }
  if (!image_size.valid()) {
    throw std::invalid_argument("image size must be positive");
  }
  if (!K.allFinite() || !rvec.allFinite() || !tvec.allFinite()) {
    throw std::invalid_argument("calibration contains non-finite values");
  }
}

Mat3 CameraCalibration::rotation() const { return rodrigues(rvec); }

Mat3 rodrigues(const Vec3& rvec) {
  const double theta = rvec.norm();
  if (theta < 1e-12) {
    // First-order expansion; exact to double precision at this magnitude.
    return Mat3::Identity() + skew(rvec);
  }
  const Vec3 k = rvec / theta;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return c * Mat3::Identity() + (1.0 - c) * k * k.transpose() + s * skew(k);
}

Vec3 rotation_to_rodrigues(const Mat3& R) {
  const Vec3 vee(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
  const double s = 0.5 * vee.norm();                 // sin(theta)
  const double c = 0.5 * (R.trace() - 1.0);          // cos(theta)
  const double theta = std::atan2(s, c);

  if (c > -0.5) {
    // theta < 2pi/3: the antisymmetric part is well conditioned.
    if (s < 1e-12) {
      return 0.5 * vee;
    }
    return vee * (theta / (2.0 * s));
  }

  // Near pi the axis comes from the symmetric part: R + R^T - 2c I = 2(1-c) k k^T.
  const Mat3 B = 0.5 * (R + R.transpose()) - c * Mat3::Identity();
  Eigen::Index col = 0;
  B.diagonal().maxCoeff(&col);
  Vec3 axis = B.col(col) / std::sqrt(std::max(B(col, col), 0.0));
  axis.normalize();
  if (axis.dot(vee) < 0.0) {
    axis = -axis;
  }
  return axis * theta;
}

ProjectedPoints project_points(std::span<const Vec3> points, const CameraCalibration& calib) {
  const Mat3 R = calib.rotation();
  ProjectedPoints out;
  out.pixels.reserve(points.size());
  out.source_index.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec3 pc = R * points[i] + calib.tvec;
    if (!(pc.z() > kMinDepth)) {
      continue;
    }
    const Vec3 p = calib.K * pc;
    out.pixels.emplace_back(p.x() / p.z(), p.y() / p.z());
    out.source_index.push_back(i);
  }
  return out;
}

CameraCalibration scale_calibration(const CameraCalibration& calib, double s) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw std::invalid_argument("calibration scale must be positive");
  }
  CameraCalibration out = calib;
  out.K(0, 0) *= s;
  out.K(0, 1) *= s;
  out.K(0, 2) *= s;
  out.K(1, 1) *= s;
  out.K(1, 2) *= s;
  out.image_size.width = static_cast<int>(std::lround(calib.image_size.width * s));
  out.image_size.height = static_cast<int>(std::lround(calib.image_size.height * s));
  return out;
}

Vec3 camera_center(const CameraCalibration& calib) {
  return -(calib.rotation().transpose() * calib.tvec);
}

}  // namespace mca
