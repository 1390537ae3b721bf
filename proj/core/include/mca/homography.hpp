#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mca/camera.hpp"
#include "mca/ground_grid.hpp"
#include "mca/types.hpp"

namespace mca {

/// Projective map from src_camera pixels to dst_camera pixels.
struct Homography {
  Mat3 H = Mat3::Identity();
  std::size_t inlier_count = 0;
  int src_camera = 0;
  int dst_camera = 0;

  /// Maps dst -> src; H(2,2) is renormalised to 1 when possible.
  [[nodiscard]] Homography inverse() const;
};

/// Scales H so that H(2,2) == 1 unless that entry is (numerically) zero.
[[nodiscard]] Mat3 normalize_homography(const Mat3& H);

/// Homogeneous multiply followed by the perspective divide.
/// Throws PointAtInfinityError when |w| < 1e-12.
[[nodiscard]] Vec2 project_point_h(const Mat3& H, const Vec2& p);
[[nodiscard]] Vec2 project_point_h(const Homography& h, const Vec2& p);

/// ||H a - b|| + ||H^-1 b - a||; +inf when either side maps to infinity.
[[nodiscard]] double symmetric_transfer_error(const Mat3& H, const Mat3& H_inv, const Vec2& a,
                                              const Vec2& b);

/// Least-squares homography from >= 4 correspondences using Hartley
/// normalisation. Throws EstimationError on too few or degenerate points.
[[nodiscard]] Mat3 fit_homography_dlt(std::span<const Vec2> src, std::span<const Vec2> dst);

struct RansacOptions {
  double threshold_px = 10.0;
  int max_iters = 2000;
  double confidence = 0.999;
  std::uint64_t seed = 0;
};

struct RansacFit {
  Homography homography;
  std::vector<std::size_t> inliers;  // ascending indices into src/dst
  int iterations = 0;
};

[[nodiscard]] RansacFit ransac_fit_homography(std::span<const Vec2> src, std::span<const Vec2> dst,
                                              const RansacOptions& options = {});

/// RANSAC over 4-point DLT samples, then a normalised-DLT refit over the
/// consensus set. Deterministic for a given seed.
[[nodiscard]] Homography estimate_homography_ransac(std::span<const Vec2> src,
                                                    std::span<const Vec2> dst,
                                                    const RansacOptions& options = {});

/// Co-visible grid points of two cameras (positive depth, strictly inside both images).
struct GridCorrespondences {
  std::vector<Vec2> pixels_a;
  std::vector<Vec2> pixels_b;
};

[[nodiscard]] GridCorrespondences covisible_grid_points(const CameraCalibration& a,
                                                        const CameraCalibration& b,
                                                        std::span<const Vec3> grid_points);

/// Plane-induced homography a -> b estimated from the projected ground grid.
/// Throws NoOverlapError when fewer than four grid points are co-visible.
[[nodiscard]] Homography compute_pair_homography(const CameraCalibration& a,
                                                 const CameraCalibration& b,
                                                 const GroundGrid& grid = {},
                                                 const RansacOptions& options = {});

}  // namespace mca
