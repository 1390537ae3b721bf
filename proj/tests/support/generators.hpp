#pragma once

// Hand-rolled random generators for property tests. Every generator takes the
// engine explicitly so that a failing case can be replayed from its seed.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "mca/camera.hpp"
#include "mca/types.hpp"

namespace gen {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline mca::Vec3 unit_vector(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  mca::Vec3 v;
  do {
    v = mca::Vec3(n(rng), n(rng), n(rng));
  } while (v.norm() < 1e-6);
  return v.normalized();
}

/// Rotation vector with angle uniform in [0, max_angle).
inline mca::Vec3 rotation_vector(Rng& rng, double max_angle = std::numbers::pi) {
  return unit_vector(rng) * uniform(rng, 0.0, max_angle);
}

inline mca::Vec2 point_in(Rng& rng, double w, double h) {
  return {uniform(rng, 0.0, w), uniform(rng, 0.0, h)};
}

/// Well-conditioned random homography: similarity * mild projective part.
inline mca::Mat3 homography(Rng& rng) {
  const double a = uniform(rng, -0.5, 0.5);
  const double s = uniform(rng, 0.7, 1.4);
  mca::Mat3 H;
  H << s * std::cos(a), -s * std::sin(a), uniform(rng, -50, 50),  //
      s * std::sin(a), s * std::cos(a), uniform(rng, -50, 50),    //
      uniform(rng, -2e-4, 2e-4), uniform(rng, -2e-4, 2e-4), 1.0;
  return H;
}

inline Eigen::MatrixXd cost_matrix(Rng& rng, int rows, int cols, bool integers) {
  Eigen::MatrixXd C(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      C(i, j) = integers ? static_cast<double>(uniform_int(rng, 0, 20)) : uniform(rng, -5.0, 5.0);
    }
  }
  return C;
}

inline std::vector<double> confidences(Rng& rng, int n) {
  std::vector<double> c(static_cast<std::size_t>(n));
  for (auto& v : c) {
    v = uniform(rng, 0.0, 1.0);
  }
  return c;
}

/// Camera at `center` looking at `target` with z up in the world.
inline mca::CameraCalibration look_at(int id, const mca::Vec3& center, const mca::Vec3& target,
                                      double f = 1000.0, mca::ImageSize size = {1280, 720}) {
  const mca::Vec3 z = (target - center).normalized();
  const mca::Vec3 x = z.cross(mca::Vec3::UnitZ()).normalized();
  const mca::Vec3 y = z.cross(x);
  mca::Mat3 R;
  R.row(0) = x.transpose();
  R.row(1) = y.transpose();
  R.row(2) = z.transpose();
  mca::CameraCalibration c;
  c.camera_id = id;
  c.K << f, 0.0, 0.5 * size.width, 0.0, f, 0.5 * size.height, 0.0, 0.0, 1.0;
  c.rvec = mca::rotation_to_rodrigues(R);
  c.tvec = -(R * center);
  c.image_size = size;
  return c;
}

/// Closed-form homography induced by the plane z = height between two cameras:
/// a pixel of A back-projects onto the plane and is re-projected into B.
inline mca::Mat3 plane_homography(const mca::CameraCalibration& a,
                                  const mca::CameraCalibration& b, double height) {
  // World plane points (x, y, height, 1) -> pixels: P * [e1 e2 h*e3 + e4].
  auto plane_to_image = [height](const mca::CameraCalibration& c) {
    const mca::Mat3 R = c.rotation();
    mca::Mat3 M;
    M.col(0) = R.col(0);
    M.col(1) = R.col(1);
    M.col(2) = height * R.col(2) + c.tvec;
    return mca::Mat3(c.K * M);
  };
  mca::Mat3 H = plane_to_image(b) * plane_to_image(a).inverse();
  return H / H(2, 2);
}

}  // namespace gen
