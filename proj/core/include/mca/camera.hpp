#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mca/types.hpp"

namespace mca {

/// Pinhole camera without distortion. World units are meters.
struct CameraCalibration {
  int camera_id = 0;
  Mat3 K = Mat3::Identity();
  Vec3 rvec = Vec3::Zero();  ///< Rodrigues rotation, world -> camera
  Vec3 tvec = Vec3::Zero();  ///< translation, world -> camera (meters)
  ImageSize image_size{};

  /// Throws std::invalid_argument when K is not upper-triangular with
  /// K(2,2) = 1 and positive focal lengths, or the image size is not positive.
  void validate() const;

  [[nodiscard]] Mat3 rotation() const;
};

/// Rotation vector to rotation matrix (Rodrigues formula).
[[nodiscard]] Mat3 rodrigues(const Vec3& rvec);

/// Inverse of rodrigues(); returns the rotation vector with angle in [0, pi].
[[nodiscard]] Vec3 rotation_to_rodrigues(const Mat3& R);

/// Projected pixels together with the input index each pixel came from.
/// Points at or behind the camera plane are dropped.
struct ProjectedPoints {
  std::vector<Vec2> pixels;
  std::vector<std::size_t> source_index;
};

inline constexpr double kMinDepth = 1e-9;

[[nodiscard]] ProjectedPoints project_points(std::span<const Vec3> points,
                                             const CameraCalibration& calib);

/// Rescale intrinsics for a resized image; extrinsics are untouched.
[[nodiscard]] CameraCalibration scale_calibration(const CameraCalibration& calib, double s);

/// Camera centre in world coordinates.
[[nodiscard]] Vec3 camera_center(const CameraCalibration& calib);

}  // namespace mca
