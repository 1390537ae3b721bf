#pragma once

#include <cstddef>
#include <deque>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "mca/dataset.hpp"
#include "mca/matches.hpp"

namespace mca {

enum class AffinityMetric { M4, M5 };

[[nodiscard]] std::string_view to_string(AffinityMetric metric);
/// Accepts "M4"/"m4"/"M5"/"m5"; throws std::invalid_argument otherwise.
[[nodiscard]] AffinityMetric parse_metric(std::string_view text);

/// Noisy-OR fusion 1 - prod(1 - c_k). Empty input gives 0.
/// Throws std::invalid_argument for a confidence outside [0, 1].
[[nodiscard]] double affinity_m4(std::span<const double> confidences);
[[nodiscard]] double affinity_m4(std::span<const KeypointMatch> matches);

struct FrameAffinity {
  int frame_id = 0;
  double value = 0.0;
};

/// Mean of the per-frame fused values. Throws std::invalid_argument on an
/// empty window.
[[nodiscard]] double affinity_m5(std::span<const FrameAffinity> per_frame);

/// Rows are detections in camera A, columns detections in camera B.
struct AffinityMatrix {
  int frame_id = 0;
  AffinityMetric metric = AffinityMetric::M4;
  std::vector<int> row_person_ids;
  std::vector<int> col_person_ids;
  Eigen::MatrixXd values;
};

/// M4 over every detection pair; pairs without keypoints are 0.
[[nodiscard]] AffinityMatrix build_affinity_m4(int frame_id, const std::vector<Detection>& dets_a,
                                               const std::vector<Detection>& dets_b,
                                               const GroupedMatches& grouped);

/// Builds affinity matrices frame by frame for one camera pair. For M5 it
/// keeps the M4 values of the last `window` frames, keyed by the per-camera
/// person ids, and averages over the frames where both persons were present.
/// Frames must be supplied in increasing frame order.
class AffinityBuilder {
 public:
  explicit AffinityBuilder(AffinityMetric metric, int window = 3);

  [[nodiscard]] AffinityMatrix build(int frame_id, const std::vector<Detection>& dets_a,
                                     const std::vector<Detection>& dets_b,
                                     const GroupedMatches& grouped);

  [[nodiscard]] AffinityMetric metric() const { return metric_; }
  [[nodiscard]] int window() const { return window_; }

  /// Values recorded for a person pair across the current window, oldest first.
  [[nodiscard]] std::vector<FrameAffinity> history(int person_a, int person_b) const;

 private:
  struct FrameEntry {
    int frame_id = 0;
    std::map<std::pair<int, int>, double> m4;
  };

  AffinityMetric metric_;
  int window_;
  std::deque<FrameEntry> frames_;
};

/// Delimited dump: frame_id,row,col,person_a,person_b,affinity for every cell.
void write_affinity(std::ostream& out, const AffinityMatrix& A, bool header = true);

}  // namespace mca
