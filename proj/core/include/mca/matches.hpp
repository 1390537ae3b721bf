#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mca/dataset.hpp"
#include "mca/homography.hpp"
#include "mca/polygon.hpp"
#include "mca/types.hpp"

namespace mca {

/// A point pair across two views with a matcher confidence in [0, 1].
struct KeypointMatch {
  Vec2 pt_a = Vec2::Zero();
  Vec2 pt_b = Vec2::Zero();
  double confidence = 0.0;

  friend bool operator==(const KeypointMatch& l, const KeypointMatch& r) {
    return l.pt_a == r.pt_a && l.pt_b == r.pt_b && l.confidence == r.confidence;
  }
};

enum class Provenance { File, Synthetic };

struct MatchSet {
  int frame_id = 0;
  int camera_a = 0;
  int camera_b = 0;
  ImageSize size_a = kWorkingSize;
  ImageSize size_b = kWorkingSize;
  std::vector<KeypointMatch> matches;
  Provenance provenance = Provenance::File;

  friend bool operator==(const MatchSet&, const MatchSet&) = default;
};

// ---------------------------------------------------------------------------
// Interchange format
//
//   MCAMATCH 1 frame_id=<int> camera_a=<int> camera_b=<int> size_a=<W>x<H> size_b=<W>x<H>
//   <x_a>,<y_a>,<x_b>,<y_b>,<confidence>
//   ...
//
// The first line is the header; every following non-blank line is one match
// with exactly five comma-separated decimal fields (no column-name row).

inline constexpr std::string_view kMatchMagic = "MCAMATCH";
inline constexpr int kMatchFormatVersion = 1;

/// Throws ParseError for a bad header and ValidationError (1-based line
/// number) for a bad record: wrong column count, non-finite coordinate, or
/// confidence outside [0, 1].
[[nodiscard]] MatchSet parse_matches(std::string_view text);
[[nodiscard]] MatchSet load_matches(const std::filesystem::path& path);

void write_matches(std::ostream& out, const MatchSet& ms);
void write_matches(const std::filesystem::path& path, const MatchSet& ms);

// ---------------------------------------------------------------------------
// Filtering

/// Keeps matches with confidence >= threshold, order preserved.
[[nodiscard]] MatchSet filter_by_confidence(const MatchSet& ms, double threshold);

/// Overlap regions of two views related by H (a -> b): region_a is
/// H^-1(rect_b) clipped to rect_a and region_b is H(rect_a) clipped to rect_b.
/// Construction throws MaskDegenerateError for a degenerate warp.
class OverlapMask {
 public:
  OverlapMask(const Homography& h_ab, const ImageSize& size_a, const ImageSize& size_b);

  [[nodiscard]] bool keeps(const KeypointMatch& m) const;
  [[nodiscard]] bool contains_a(const Vec2& p) const;
  [[nodiscard]] bool contains_b(const Vec2& p) const;

  [[nodiscard]] const Polygon& region_a() const { return region_a_; }
  [[nodiscard]] const Polygon& region_b() const { return region_b_; }
  /// Unclipped warps, useful as plot data.
  [[nodiscard]] const Polygon& warped_b_in_a() const { return warped_b_in_a_; }
  [[nodiscard]] const Polygon& warped_a_in_b() const { return warped_a_in_b_; }

  [[nodiscard]] MatchSet apply(const MatchSet& ms) const;

 private:
  Polygon warped_b_in_a_;
  Polygon warped_a_in_b_;
  Polygon region_a_;
  Polygon region_b_;
};

[[nodiscard]] MatchSet overlap_mask_filter(const MatchSet& ms, const Homography& h_ab,
                                           const ImageSize& size_a, const ImageSize& size_b);

/// Matches grouped by (index in dets_a, index in dets_b).
using GroupedMatches = std::map<std::pair<std::size_t, std::size_t>, std::vector<KeypointMatch>>;

/// A match joins pair (i, j) when pt_a lies in dets_a[i] and pt_b in dets_b[j]
/// (closed boxes). Points inside several boxes contribute to every combination.
[[nodiscard]] GroupedMatches assign_to_detections(const MatchSet& ms,
                                                  const std::vector<Detection>& dets_a,
                                                  const std::vector<Detection>& dets_b);

}  // namespace mca
