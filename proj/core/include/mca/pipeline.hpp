#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mca/affinity.hpp"
#include "mca/assignment.hpp"
#include "mca/dataset.hpp"
#include "mca/evaluation.hpp"
#include "mca/homography.hpp"
#include "mca/matches.hpp"
#include "mca/refactor.hpp"

namespace mca {

/// One association run's hyperparameters.
struct PipelineConfig {
  double loftr_threshold = 0.0;
  double distance_coefficient = 0.0;
  AffinityMetric metric = AffinityMetric::M4;
  int window = 3;
  double accept_threshold = 0.0;
  bool symmetric_residual = false;
};

/// Everything about a camera pair that does not change between frames.
struct PairContext {
  int camera_a = 0;
  int camera_b = 0;
  Homography homography;  // a -> b at working resolution
  ImageSize size_a = kWorkingSize;
  ImageSize size_b = kWorkingSize;
  std::shared_ptr<const OverlapMask> mask;
};

/// Builds the overlap mask once. Throws MaskDegenerateError.
[[nodiscard]] PairContext make_pair_context(const Homography& h_ab, const ImageSize& size_a,
                                            const ImageSize& size_b);

/// A frame's detections plus its matches; `failure` explains missing matches.
struct FrameInput {
  FramePair pair;
  std::optional<MatchSet> matches;
  std::string failure;
};

struct FrameResult {
  int frame_id = 0;
  std::size_t matches_in = 0;
  std::size_t matches_kept = 0;  // after threshold and mask
  AffinityMatrix affinity;
  Association association;
  EvalCounts counts;
  std::string failure;  // empty when the frame ran normally
};

struct PairRun {
  std::vector<FrameResult> frames;
  EvalCounts totals;
  Scores scores;
  std::size_t failed_frames = 0;
};

/// Runs threshold -> mask -> refactor -> group -> affinity -> associate ->
/// score for each frame in order. Frames without usable matches predict
/// nothing and are recorded as soft failures.
[[nodiscard]] PairRun run_pair(const PairContext& ctx, const std::vector<FrameInput>& frames,
                               const PipelineConfig& config);

/// Reads annotations and match files for one pair from a dataset layout.
/// Detections are scaled by `scale`; a missing or invalid match file becomes
/// a frame failure instead of an exception.
[[nodiscard]] std::vector<FrameInput> load_frame_inputs(const DatasetLayout& layout, int camera_a,
                                                        int camera_b, double scale,
                                                        const FrameRange& range = {});

/// Plane-induced homography between two dataset cameras at `scale`.
[[nodiscard]] Homography dataset_homography(const DatasetLayout& layout, int camera_a,
                                            int camera_b, double scale,
                                            const GroundGrid& grid = {},
                                            const RansacOptions& options = {});

}  // namespace mca
