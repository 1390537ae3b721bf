#pragma once

#include <vector>

#include "mca/types.hpp"

namespace mca {

using Polygon = std::vector<Vec2>;

/// Positive for counter-clockwise vertex order (y axis up).
[[nodiscard]] double signed_area(const Polygon& poly);

/// Axis-aligned rectangle [0, w] x [0, h] as a counter-clockwise polygon.
[[nodiscard]] Polygon image_rectangle(const ImageSize& size);

/// Sutherland-Hodgman clip of `subject` against the convex polygon `clip`.
/// Both inputs must be counter-clockwise; the result is counter-clockwise.
[[nodiscard]] Polygon clip_convex(const Polygon& subject, const Polygon& clip);

/// Keeps the part of `subject` where a*x + b*y + c >= 0.
[[nodiscard]] Polygon clip_half_plane(const Polygon& subject, double a, double b, double c);

/// Closed containment test for a counter-clockwise convex polygon.
[[nodiscard]] bool contains_convex(const Polygon& poly, const Vec2& p, double tol = 1e-9);

/// True when the polygon has >= 3 vertices and turns consistently.
[[nodiscard]] bool is_convex(const Polygon& poly);

/// Warps a convex polygon through a homography. The part of the polygon on
/// the far side of the line that maps to infinity is cut away first, keeping
/// the side that contains the polygon's centroid. Throws MaskDegenerateError
/// when the centroid itself maps to infinity or the warped outline is not a
/// simple convex polygon of non-negligible area.
[[nodiscard]] Polygon warp_convex_polygon(const Mat3& H, const Polygon& poly);

}  // namespace mca
