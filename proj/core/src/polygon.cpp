#include "mca/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mca {

namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

Vec2 centroid(const Polygon& poly) {
  Vec2 c = Vec2::Zero();
  for (const auto& p : poly) {
    c += p;
  }
  return c / static_cast<double>(poly.size());
}

double extent(const Polygon& poly) {
  double e = 0.0;
  for (const auto& p : poly) {
    e = std::max(e, p.cwiseAbs().maxCoeff());
  }
  return e;
}

}  // namespace

double signed_area(const Polygon& poly) {
  if (poly.size() < 3) {
    return 0.0;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % poly.size()];
    acc += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * acc;
}

Polygon image_rectangle(const ImageSize& size) {
  const double w = size.width;
  const double h = size.height;
  return {Vec2(0.0, 0.0), Vec2(w, 0.0), Vec2(w, h), Vec2(0.0, h)};
}

Polygon clip_half_plane(const Polygon& subject, double a, double b, double c) {
  Polygon out;
  if (subject.empty()) {
    return out;
  }
  auto value = [&](const Vec2& p) { return a * p.x() + b * p.y() + c; };
  for (std::size_t i = 0; i < subject.size(); ++i) {
    const Vec2& cur = subject[i];
    const Vec2& prev = subject[(i + subject.size() - 1) % subject.size()];
    const double vc = value(cur);
    const double vp = value(prev);
    if (vc >= 0.0) {
      if (vp < 0.0) {
        out.push_back(prev + (cur - prev) * (vp / (vp - vc)));
      }
      out.push_back(cur);
    } else if (vp >= 0.0) {
      out.push_back(prev + (cur - prev) * (vp / (vp - vc)));
    }
  }
  return out;
}

Polygon clip_convex(const Polygon& subject, const Polygon& clip) {
  Polygon out = subject;
  for (std::size_t i = 0; i < clip.size() && !out.empty(); ++i) {
    const Vec2& p = clip[i];
    const Vec2& q = clip[(i + 1) % clip.size()];
    // Left of p->q is inside for counter-clockwise clip polygons.
    const double a = -(q.y() - p.y());
    const double b = q.x() - p.x();
    const double c = -(a * p.x() + b * p.y());
    out = clip_half_plane(out, a, b, c);
  }
  return out;
}

bool contains_convex(const Polygon& poly, const Vec2& p, double tol) {
  if (poly.size() < 3) {
    return false;
  }
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    const double len = (b - a).norm();
    if (len == 0.0) {
      continue;
    }
    if (cross(a, b, p) / len < -tol) {
      return false;
    }
  }
  return true;
}

bool is_convex(const Polygon& poly) {
  if (poly.size() < 3) {
    return false;
  }
  const double scale = extent(poly);
  const double tol = 1e-12 * scale * scale;
  int sign = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const double z = cross(poly[i], poly[(i + 1) % poly.size()], poly[(i + 2) % poly.size()]);
    if (std::abs(z) <= tol) {
      continue;
    }
    const int s = z > 0.0 ? 1 : -1;
    if (sign == 0) {
      sign = s;
    } else if (s != sign) {
      return false;
    }
  }
  if (sign == 0) {
    return false;
  }
  // Consistent turning still admits star-shaped windings; require total turn of 2*pi.
  double turn = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 e1 = poly[(i + 1) % poly.size()] - poly[i];
    const Vec2 e2 = poly[(i + 2) % poly.size()] - poly[(i + 1) % poly.size()];
    turn += std::atan2(e1.x() * e2.y() - e1.y() * e2.x(), e1.dot(e2));
  }
  return std::abs(std::abs(turn) - 2.0 * std::numbers::pi) < 1e-6;
}

Polygon warp_convex_polygon(const Mat3& H, const Polygon& poly) {
  if (poly.size() < 3) {
    throw MaskDegenerateError("cannot warp a polygon with fewer than 3 vertices");
  }
  const Vec2 c = centroid(poly);
  const double w_center = H.row(2).dot(c.homogeneous());
  const double row_scale = H.row(2).cwiseAbs().maxCoeff() * std::max(1.0, extent(poly));
  if (!(std::abs(w_center) > 1e-12 * row_scale)) {
    throw MaskDegenerateError("polygon centroid maps to infinity");
  }
  // Keep sign(w_center) * w(p) >= margin, i.e. the side of the vanishing line
  // that contains the centroid, with a small margin so nothing lands at infinity.
  const double sgn = w_center > 0.0 ? 1.0 : -1.0;
  const double margin = 1e-6 * std::abs(w_center);
  const Polygon visible =
      clip_half_plane(poly, sgn * H(2, 0), sgn * H(2, 1), sgn * H(2, 2) - margin);

  Polygon warped;
  warped.reserve(visible.size());
  for (const auto& p : visible) {
    const Vec3 q = H * p.homogeneous();
    warped.push_back(q.hnormalized());
  }
  if (!std::all_of(warped.begin(), warped.end(), [](const Vec2& p) { return p.allFinite(); })) {
    throw MaskDegenerateError("warped polygon has non-finite vertices");
  }
  if (signed_area(warped) < 0.0) {
    std::reverse(warped.begin(), warped.end());
  }
  const double area = signed_area(warped);
  const double scale = extent(warped);
  if (!(area > 1e-9 * std::max(1.0, scale * scale)) || !is_convex(warped)) {
    throw MaskDegenerateError("warped polygon is self-intersecting or has near-zero area");
  }
  return warped;
}

}  // namespace mca
