#pragma once

#include <cstddef>
#include <vector>

#include "mca/assignment.hpp"
#include "mca/dataset.hpp"

namespace mca {

struct EvalCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  EvalCounts& operator+=(const EvalCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend EvalCounts operator+(EvalCounts l, const EvalCounts& r) { return l += r; }
  friend bool operator==(const EvalCounts&, const EvalCounts&) = default;
};

struct Scores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Ground-truth positives are persons detected in both cameras. A predicted
/// pair is a tp when both detections share a person id, otherwise an fp; a
/// co-visible person not covered by a tp is an fn. A wrong match therefore
/// counts as both fp and fn.
[[nodiscard]] EvalCounts score_frame(const Association& pred, const std::vector<Detection>& dets_a,
                                     const std::vector<Detection>& dets_b);

/// Harmonic mean; 0 when p + r = 0. Works in any unit (fractions or percent).
[[nodiscard]] double f1_score(double precision, double recall);

/// Precision, recall and F1 of counts already summed over frames. Ratios with
/// a zero denominator are reported as 0.
[[nodiscard]] Scores micro_f1(const EvalCounts& counts);

}  // namespace mca
