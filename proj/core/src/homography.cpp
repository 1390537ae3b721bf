#include "mca/homography.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace mca {

namespace {

constexpr double kInfinityW = 1e-12;
constexpr std::size_t kMinimalSample = 4;

struct Normalization {
  Mat3 T = Mat3::Identity();
  Mat3 T_inv = Mat3::Identity();
};

// Hartley normalisation: centroid to the origin, mean distance sqrt(2).
Normalization hartley_normalization(std::span<const Vec2> pts) {
  Vec2 centroid = Vec2::Zero();
  for (const auto& p : pts) {
    centroid += p;
  }
  centroid /= static_cast<double>(pts.size());
  double mean_dist = 0.0;
  for (const auto& p : pts) {
    mean_dist += (p - centroid).norm();
  }
  mean_dist /= static_cast<double>(pts.size());
  if (!(mean_dist > 0.0) || !std::isfinite(mean_dist)) {
    throw EstimationError("degenerate point set: all points coincide");
  }
  const double s = std::sqrt(2.0) / mean_dist;
  Normalization n;
  n.T << s, 0.0, -s * centroid.x(),
         0.0, s, -s * centroid.y(),
         0.0, 0.0, 1.0;
  n.T_inv << 1.0 / s, 0.0, centroid.x(),
             0.0, 1.0 / s, centroid.y(),
             0.0, 0.0, 1.0;
  return n;
}

// Accumulates the DLT design matrix through a tall-skinny QR so that large
// point sets never materialise the full 2N x 9 matrix.
class DltAccumulator {
 public:
  explicit DltAccumulator(std::size_t n_points)
      : block_(static_cast<Eigen::Index>(std::min<std::size_t>(2 * n_points, 4096)), 9) {}

  void add(const Vec2& a, const Vec2& b) {
    const double x = a.x();
    const double y = a.y();
    const double u = b.x();
    const double v = b.y();
    const Eigen::Index r = fill_;
    block_.row(r) << -x, -y, -1.0, 0.0, 0.0, 0.0, u * x, u * y, u;
    block_.row(r + 1) << 0.0, 0.0, 0.0, -x, -y, -1.0, v * x, v * y, v;
    fill_ += 2;
    if (fill_ == block_.rows()) {
      flush();
    }
  }

  Eigen::Matrix<double, 9, 9> triangular() {
    flush();
    return R_;
  }

 private:
  void flush() {
    if (fill_ == 0) {
      return;
    }
    Eigen::MatrixXd stacked(9 + fill_, 9);
    stacked.topRows(9) = R_;
    stacked.bottomRows(fill_) = block_.topRows(fill_);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(stacked);
    const Eigen::Index keep = std::min<Eigen::Index>(9, stacked.rows());
    R_.setZero();
    R_.topRows(keep) = qr.matrixQR().topRows(keep).triangularView<Eigen::Upper>();
    fill_ = 0;
  }

  Eigen::Matrix<double, 9, 9> R_ = Eigen::Matrix<double, 9, 9>::Zero();
  Eigen::MatrixXd block_;
  Eigen::Index fill_ = 0;
};

bool collinear(const Vec2& a, const Vec2& b, const Vec2& c, double scale_sq) {
  const Vec2 ab = b - a;
  const Vec2 ac = c - a;
  return std::abs(ab.x() * ac.y() - ab.y() * ac.x()) <= 1e-9 * scale_sq;
}

bool degenerate_sample(const std::array<Vec2, 4>& p) {
  double scale_sq = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) {
      scale_sq = std::max(scale_sq, (p[i] - p[j]).squaredNorm());
    }
  }
  if (!(scale_sq > 0.0)) {
    return true;
  }
  return collinear(p[0], p[1], p[2], scale_sq) || collinear(p[0], p[1], p[3], scale_sq) ||
         collinear(p[0], p[2], p[3], scale_sq) || collinear(p[1], p[2], p[3], scale_sq);
}

// Transfer error without exceptions: +inf for points mapped to infinity.
inline double one_way_error(const Mat3& H, const Vec2& a, const Vec2& b) {
  const Vec3 q = H * a.homogeneous();
  if (std::abs(q.z()) < kInfinityW) {
    return std::numeric_limits<double>::infinity();
  }
  return (q.hnormalized() - b).norm();
}

struct Consensus {
  std::vector<std::size_t> inliers;
  double error_sum = 0.0;
};

Consensus consensus(const Mat3& H, std::span<const Vec2> src, std::span<const Vec2> dst,
                    double threshold) {
  Consensus c;
  const Mat3 H_inv = H.inverse();
  if (!H_inv.allFinite()) {
    return c;
  }
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double e = symmetric_transfer_error(H, H_inv, src[i], dst[i]);
    if (e <= threshold) {
      c.inliers.push_back(i);
      c.error_sum += e;
    }
  }
  return c;
}

Mat3 fit_subset(std::span<const Vec2> src, std::span<const Vec2> dst,
                std::span<const std::size_t> idx) {
  std::vector<Vec2> s;
  std::vector<Vec2> d;
  s.reserve(idx.size());
  d.reserve(idx.size());
  for (const auto i : idx) {
    s.push_back(src[i]);
    d.push_back(dst[i]);
  }
  return fit_homography_dlt(s, d);
}

}  // namespace

Homography Homography::inverse() const {
  Homography inv;
  inv.H = normalize_homography(H.inverse());
  inv.inlier_count = inlier_count;
  inv.src_camera = dst_camera;
  inv.dst_camera = src_camera;
  return inv;
}

Mat3 normalize_homography(const Mat3& H) {
  const double h22 = H(2, 2);
  if (std::abs(h22) > 1e-12 * H.cwiseAbs().maxCoeff()) {
    return H / h22;
  }
  return H;
}

Vec2 project_point_h(const Mat3& H, const Vec2& p) {
  const Vec3 q = H * p.homogeneous();
  if (std::abs(q.z()) < kInfinityW) {
    throw PointAtInfinityError("point maps to infinity under homography");
  }
  return q.hnormalized();
}

Vec2 project_point_h(const Homography& h, const Vec2& p) { return project_point_h(h.H, p); }

double symmetric_transfer_error(const Mat3& H, const Mat3& H_inv, const Vec2& a, const Vec2& b) {
  return one_way_error(H, a, b) + one_way_error(H_inv, b, a);
}

Mat3 fit_homography_dlt(std::span<const Vec2> src, std::span<const Vec2> dst) {
  if (src.size() != dst.size()) {
    throw std::invalid_argument("homography fit: src and dst sizes differ");
  }
  if (src.size() < kMinimalSample) {
    throw EstimationError("homography fit needs at least 4 correspondences");
  }
  const Normalization ns = hartley_normalization(src);
  const Normalization nd = hartley_normalization(dst);

  DltAccumulator acc(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    acc.add((ns.T * src[i].homogeneous()).hnormalized(), (nd.T * dst[i].homogeneous()).hnormalized());
  }
  const Eigen::Matrix<double, 9, 9> R = acc.triangular();
  Eigen::JacobiSVD<Eigen::Matrix<double, 9, 9>> svd(R, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (!(sv(7) > 1e-10 * sv(0))) {
    throw EstimationError("degenerate configuration: homography not unique");
  }
  const Eigen::Matrix<double, 9, 1> h = svd.matrixV().col(8);
  Mat3 Hn;
  Hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  const Mat3 H = nd.T_inv * Hn * ns.T;
  if (!H.allFinite() || std::abs(H.determinant()) < 1e-300) {
    throw EstimationError("homography fit produced a singular matrix");
  }
  return normalize_homography(H);
}

RansacFit ransac_fit_homography(std::span<const Vec2> src, std::span<const Vec2> dst,
                                const RansacOptions& options) {
  if (src.size() != dst.size()) {
    throw std::invalid_argument("ransac: src and dst sizes differ");
  }
  const std::size_t n = src.size();
  if (n < kMinimalSample) {
    throw EstimationError("ransac needs at least 4 correspondences");
  }
  if (options.max_iters <= 0) {
    throw std::invalid_argument("ransac: max_iters must be positive");
  }

  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);

  bool have_model = false;
  Mat3 best_H = Mat3::Identity();
  Consensus best;
  long needed = options.max_iters;
  int it = 0;
  for (; it < options.max_iters && it < needed; ++it) {
    std::array<std::size_t, 4> idx{};
    for (std::size_t k = 0; k < 4; ++k) {
      std::size_t candidate = 0;
      do {
        candidate = pick(rng);
      } while (std::find(idx.begin(), idx.begin() + static_cast<long>(k), candidate) !=
               idx.begin() + static_cast<long>(k));
      idx[k] = candidate;
    }
    std::array<Vec2, 4> s;
    std::array<Vec2, 4> d;
    for (std::size_t k = 0; k < 4; ++k) {
      s[k] = src[idx[k]];
      d[k] = dst[idx[k]];
    }
    if (degenerate_sample(s) || degenerate_sample(d)) {
      continue;
    }
    Mat3 H;
    try {
      H = fit_homography_dlt(s, d);
    } catch (const EstimationError&) {
      continue;
    }
    Consensus c = consensus(H, src, dst, options.threshold_px);
    const bool better = !have_model || c.inliers.size() > best.inliers.size() ||
                        (c.inliers.size() == best.inliers.size() && c.error_sum < best.error_sum);
    if (!better) {
      continue;
    }
    have_model = true;
    best_H = H;
    best = std::move(c);

    const double w = static_cast<double>(best.inliers.size()) / static_cast<double>(n);
    const double p_fail = 1.0 - w * w * w * w;
    if (p_fail <= std::numeric_limits<double>::epsilon()) {
      needed = it + 1;
    } else {
      const double k = std::log(1.0 - options.confidence) / std::log(p_fail);
      needed = std::min<long>(options.max_iters, static_cast<long>(std::ceil(k)));
    }
  }
  if (!have_model) {
    throw EstimationError("ransac: every sampled configuration was degenerate");
  }

  // Refit on the consensus set until it stops changing.
  for (int round = 0; round < 8 && best.inliers.size() >= kMinimalSample; ++round) {
    Mat3 refit;
    try {
      refit = fit_subset(src, dst, best.inliers);
    } catch (const EstimationError&) {
      break;
    }
    Consensus c = consensus(refit, src, dst, options.threshold_px);
    if (c.inliers.size() < best.inliers.size()) {
      break;
    }
    const bool stable = c.inliers == best.inliers;
    best_H = refit;
    best = std::move(c);
    if (stable) {
      break;
    }
  }

  RansacFit fit;
  fit.homography.H = normalize_homography(best_H);
  fit.homography.inlier_count = best.inliers.size();
  fit.inliers = std::move(best.inliers);
  fit.iterations = it;
  return fit;
}

Homography estimate_homography_ransac(std::span<const Vec2> src, std::span<const Vec2> dst,
                                      const RansacOptions& options) {
  return ransac_fit_homography(src, dst, options).homography;
}

GridCorrespondences covisible_grid_points(const CameraCalibration& a, const CameraCalibration& b,
                                          std::span<const Vec3> grid_points) {
  const Mat3 Ra = a.rotation();
  const Mat3 Rb = b.rotation();
  GridCorrespondences out;
  for (const auto& X : grid_points) {
    const Vec3 ca = Ra * X + a.tvec;
    const Vec3 cb = Rb * X + b.tvec;
    if (!(ca.z() > kMinDepth) || !(cb.z() > kMinDepth)) {
      continue;
    }
    const Vec2 pa = (a.K * ca).hnormalized();
    const Vec2 pb = (b.K * cb).hnormalized();
    if (a.image_size.contains_strict(pa) && b.image_size.contains_strict(pb)) {
      out.pixels_a.push_back(pa);
      out.pixels_b.push_back(pb);
    }
  }
  return out;
}

Homography compute_pair_homography(const CameraCalibration& a, const CameraCalibration& b,
                                   const GroundGrid& grid, const RansacOptions& options) {
  a.validate();
  b.validate();
  const std::vector<Vec3> points = generate_ground_grid(grid);
  const GridCorrespondences corr = covisible_grid_points(a, b, points);
  if (corr.pixels_a.size() < kMinimalSample) {
    throw NoOverlapError("cameras " + std::to_string(a.camera_id) + " and " +
                         std::to_string(b.camera_id) + " share fewer than 4 grid points");
  }
  Homography h = estimate_homography_ransac(corr.pixels_a, corr.pixels_b, options);
  h.src_camera = a.camera_id;
  h.dst_camera = b.camera_id;
  return h;
}

}  // namespace mca
