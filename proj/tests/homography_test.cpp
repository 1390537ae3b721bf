#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "mca/homography.hpp"

using namespace mca;

namespace {

std::vector<Vec2> map_points(const Mat3& H, const std::vector<Vec2>& pts) {
  std::vector<Vec2> out;
  for (const auto& p : pts) {
    out.push_back((H * p.homogeneous()).hnormalized());
  }
  return out;
}

double max_entry_error(const Mat3& a, const Mat3& b) {
  return ((a / a(2, 2)) - (b / b(2, 2))).cwiseAbs().maxCoeff();
}

// Two cameras above the plane z = 1 that both see the square around the origin.
std::pair<CameraCalibration, CameraCalibration> rig() {
  auto a = gen::look_at(1, Vec3(-6, -8, 6), Vec3(0, 0, 1), 900.0);
  auto b = gen::look_at(2, Vec3(7, -6, 5), Vec3(0, 0, 1), 1100.0);
  return {a, b};
}

}  // namespace

TEST(ProjectPoint, PerspectiveDivide) {
  Mat3 H = Mat3::Identity();
  H(2, 2) = 2.0;
  EXPECT_TRUE(project_point_h(H, Vec2(4, 6)).isApprox(Vec2(2, 3)));
}

TEST(ProjectPoint, ThrowsAtInfinity) {
  Mat3 H = Mat3::Identity();
  H(2, 0) = 1.0;
  H(2, 2) = 0.0;
  EXPECT_THROW((void)project_point_h(H, Vec2(0, 5)), PointAtInfinityError);
}

TEST(Normalize, UnitBottomRight) {
  Mat3 H = Mat3::Identity() * 4.0;
  H(0, 2) = 8.0;
  const Mat3 N = normalize_homography(H);
  EXPECT_DOUBLE_EQ(N(2, 2), 1.0);
  EXPECT_DOUBLE_EQ(N(0, 2), 2.0);
}

TEST(Dlt, ExactFourPoints) {
  gen::Rng rng(1);
  const Mat3 H = gen::homography(rng);
  const std::vector<Vec2> src{{0, 0}, {100, 0}, {100, 80}, {0, 80}};
  const auto dst = map_points(H, src);
  EXPECT_LT(max_entry_error(fit_homography_dlt(src, dst), H), 1e-9);
}

TEST(Dlt, ExactManyPointsProperty) {
  gen::Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const Mat3 H = gen::homography(rng);
    std::vector<Vec2> src;
    for (int k = 0; k < 40; ++k) {
      src.push_back(gen::point_in(rng, 1280, 720));
    }
    const auto dst = map_points(H, src);
    const Mat3 fit = fit_homography_dlt(src, dst);
    const auto back = map_points(fit, src);
    for (std::size_t k = 0; k < src.size(); ++k) {
      EXPECT_LT((back[k] - dst[k]).norm(), 1e-6);
    }
  }
}

TEST(Dlt, ThrowsOnTooFewOrCollinear) {
  const std::vector<Vec2> three{{0, 0}, {1, 0}, {0, 1}};
  EXPECT_THROW((void)fit_homography_dlt(three, three), EstimationError);
  const std::vector<Vec2> line{{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}};
  EXPECT_THROW((void)fit_homography_dlt(line, line), EstimationError);
}

TEST(Ransac, RecoversUnderOutliers) {
  gen::Rng rng(3);
  const Mat3 H = gen::homography(rng);
  std::vector<Vec2> src;
  std::vector<Vec2> dst;
  for (int k = 0; k < 100; ++k) {
    src.push_back(gen::point_in(rng, 1280, 720));
  }
  dst = map_points(H, src);
  for (int k = 0; k < 30; ++k) {
    const Vec2 s = gen::point_in(rng, 1280, 720);
    Vec2 d;
    do {
      d = gen::point_in(rng, 1280, 720);
    } while ((project_point_h(H, s) - d).norm() < 20.0);
    src.push_back(s);
    dst.push_back(d);
  }
  const RansacFit fit = ransac_fit_homography(src, dst);
  EXPECT_GE(fit.homography.inlier_count, 100u);
  for (int k = 0; k < 100; ++k) {
    EXPECT_LT((project_point_h(fit.homography, src[static_cast<std::size_t>(k)]) -
               dst[static_cast<std::size_t>(k)])
                  .norm(),
              1e-6);
  }
  EXPECT_TRUE(std::is_sorted(fit.inliers.begin(), fit.inliers.end()));
}

TEST(Ransac, DeterministicForSeed) {
  gen::Rng rng(4);
  const Mat3 H = gen::homography(rng);
  std::vector<Vec2> src;
  for (int k = 0; k < 60; ++k) {
    src.push_back(gen::point_in(rng, 640, 480));
  }
  auto dst = map_points(H, src);
  for (int k = 0; k < 20; ++k) {
    dst[static_cast<std::size_t>(k)] += Vec2(gen::uniform(rng, 30, 60), gen::uniform(rng, 30, 60));
  }
  RansacOptions o;
  o.seed = 99;
  const auto a = ransac_fit_homography(src, dst, o);
  const auto b = ransac_fit_homography(src, dst, o);
  EXPECT_EQ(a.homography.H, b.homography.H);
  EXPECT_EQ(a.inliers, b.inliers);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Ransac, ThrowsOnTooFewPoints) {
  const std::vector<Vec2> three{{0, 0}, {1, 0}, {0, 1}};
  EXPECT_THROW((void)ransac_fit_homography(three, three), EstimationError);
}

TEST(SymmetricTransfer, ZeroForExactPair) {
  gen::Rng rng(5);
  const Mat3 H = gen::homography(rng);
  const Vec2 a(10, 20);
  const Vec2 b = project_point_h(H, a);
  EXPECT_LT(symmetric_transfer_error(H, H.inverse(), a, b), 1e-9);
  EXPECT_NEAR(symmetric_transfer_error(Mat3::Identity(), Mat3::Identity(), Vec2(0, 0), Vec2(3, 4)),
              10.0, 1e-12);
}

TEST(Inverse, ComposesToIdentity) {
  gen::Rng rng(6);
  Homography h;
  h.H = gen::homography(rng);
  h.src_camera = 1;
  h.dst_camera = 4;
  const Homography inv = h.inverse();
  EXPECT_EQ(inv.src_camera, 4);
  EXPECT_EQ(inv.dst_camera, 1);
  EXPECT_LT(max_entry_error(inv.H * h.H, Mat3::Identity()), 1e-12);
}

TEST(PairHomography, MatchesClosedFormPlaneHomography) {
  const auto [a, b] = rig();
  const Homography h = compute_pair_homography(a, b);
  const Mat3 oracle = gen::plane_homography(a, b, GroundGrid{}.elevation());
  EXPECT_EQ(h.src_camera, 1);
  EXPECT_EQ(h.dst_camera, 2);
  EXPECT_GT(h.inlier_count, 0u);
  const Mat3 diff = (h.H / h.H(2, 2)) - oracle;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      EXPECT_LT(std::abs(diff(i, j)), 1e-6 * std::max(1.0, std::abs(oracle(i, j))))
          << "entry " << i << "," << j;
    }
  }
}

TEST(PairHomography, IdenticalCameraGivesIdentity) {
  const auto [a, b] = rig();
  const Homography h = compute_pair_homography(a, a);
  EXPECT_LT(max_entry_error(h.H, Mat3::Identity()), 1e-9);
}

TEST(PairHomography, CovisiblePointsInsideBothImages) {
  const auto [a, b] = rig();
  const auto grid = generate_ground_grid(GroundGrid{});
  const auto c = covisible_grid_points(a, b, grid);
  ASSERT_EQ(c.pixels_a.size(), c.pixels_b.size());
  ASSERT_FALSE(c.pixels_a.empty());
  for (std::size_t k = 0; k < c.pixels_a.size(); ++k) {
    EXPECT_TRUE(a.image_size.contains_strict(c.pixels_a[k]));
    EXPECT_TRUE(b.image_size.contains_strict(c.pixels_b[k]));
  }
}

TEST(PairHomography, NoOverlapThrows) {
  const auto a = gen::look_at(1, Vec3(0, 0, 5), Vec3(0, 100, 1));
  const auto b = gen::look_at(2, Vec3(0, 0, 5), Vec3(0, -100, 1));
  EXPECT_THROW((void)compute_pair_homography(a, b), NoOverlapError);
}
