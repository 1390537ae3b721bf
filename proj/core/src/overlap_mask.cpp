#include <cmath>

#include "mca/matches.hpp"

namespace mca {

namespace {

Polygon clip_to_image(const Polygon& warped, const ImageSize& size) {
  Polygon region = clip_convex(warped, image_rectangle(size));
  // An overlap that only touches the image along an edge or a corner is empty.
  if (region.size() < 3 || signed_area(region) <= 1e-9) {
    region.clear();
  }
  return region;
}

}  // namespace

OverlapMask::OverlapMask(const Homography& h_ab, const ImageSize& size_a,
                         const ImageSize& size_b) {
  if (!size_a.valid() || !size_b.valid()) {
    throw std::invalid_argument("overlap mask needs positive image sizes");
  }
  const Mat3& H = h_ab.H;
  const double det = H.determinant();
  if (!std::isfinite(det) || std::abs(det) < 1e-12 * std::pow(H.cwiseAbs().maxCoeff(), 3)) {
    throw MaskDegenerateError("homography is singular");
  }
  warped_b_in_a_ = warp_convex_polygon(H.inverse(), image_rectangle(size_b));
  warped_a_in_b_ = warp_convex_polygon(H, image_rectangle(size_a));
  region_a_ = clip_to_image(warped_b_in_a_, size_a);
  region_b_ = clip_to_image(warped_a_in_b_, size_b);
}

bool OverlapMask::contains_a(const Vec2& p) const { return contains_convex(region_a_, p); }

bool OverlapMask::contains_b(const Vec2& p) const { return contains_convex(region_b_, p); }

bool OverlapMask::keeps(const KeypointMatch& m) const {
  return contains_a(m.pt_a) && contains_b(m.pt_b);
}

MatchSet OverlapMask::apply(const MatchSet& ms) const {
  MatchSet out = ms;
  out.matches.clear();
  for (const auto& m : ms.matches) {
    if (keeps(m)) {
      out.matches.push_back(m);
    }
  }
  return out;
}

MatchSet overlap_mask_filter(const MatchSet& ms, const Homography& h_ab, const ImageSize& size_a,
                             const ImageSize& size_b) {
  return OverlapMask(h_ab, size_a, size_b).apply(ms);
}

}  // namespace mca
