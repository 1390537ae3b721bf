#include "mca/pipeline.hpp"

#include <cmath>
#include <exception>
#include <utility>

namespace mca {

namespace {

// Orients a match set to the context's (a, b) order or explains why it cannot.
std::string orient(MatchSet& ms, const PairContext& ctx) {
  if (ms.camera_a == ctx.camera_b && ms.camera_b == ctx.camera_a) {
    for (auto& m : ms.matches) {
      std::swap(m.pt_a, m.pt_b);
    }
    std::swap(ms.camera_a, ms.camera_b);
    std::swap(ms.size_a, ms.size_b);
  }
  if (ms.camera_a != ctx.camera_a || ms.camera_b != ctx.camera_b) {
    return "match file is for cameras " + std::to_string(ms.camera_a) + "," +
           std::to_string(ms.camera_b);
  }
  if (ms.size_a != ctx.size_a || ms.size_b != ctx.size_b) {
    return "match file image size differs from the working resolution";
  }
  return {};
}

}  // namespace

PairContext make_pair_context(const Homography& h_ab, const ImageSize& size_a,
                              const ImageSize& size_b) {
  PairContext ctx;
  ctx.camera_a = h_ab.src_camera;
  ctx.camera_b = h_ab.dst_camera;
  ctx.homography = h_ab;
  ctx.size_a = size_a;
  ctx.size_b = size_b;
  ctx.mask = std::make_shared<const OverlapMask>(h_ab, size_a, size_b);
  return ctx;
}

PairRun run_pair(const PairContext& ctx, const std::vector<FrameInput>& frames,
                 const PipelineConfig& config) {
  PairRun run;
  AffinityBuilder builder(config.metric, config.window);
  const RefactorParams refactor{config.distance_coefficient, config.symmetric_residual};

  for (const auto& in : frames) {
    FrameResult r;
    r.frame_id = in.pair.frame_id;
    r.failure = in.failure;

    MatchSet ms;
    ms.frame_id = r.frame_id;
    ms.camera_a = ctx.camera_a;
    ms.camera_b = ctx.camera_b;
    ms.size_a = ctx.size_a;
    ms.size_b = ctx.size_b;
    if (in.matches) {
      MatchSet given = *in.matches;
      if (auto why = orient(given, ctx); why.empty()) {
        ms = std::move(given);
      } else if (r.failure.empty()) {
        r.failure = std::move(why);
      }
    } else if (r.failure.empty()) {
      r.failure = "no matches";
    }
    r.matches_in = ms.matches.size();

    ms = filter_by_confidence(ms, config.loftr_threshold);
    if (ctx.mask) {
      ms = ctx.mask->apply(ms);
    }
    r.matches_kept = ms.matches.size();
    ms = refactor_matches(ms, ctx.homography, refactor);

    const auto grouped = assign_to_detections(ms, in.pair.detections_a, in.pair.detections_b);
    r.affinity = builder.build(r.frame_id, in.pair.detections_a, in.pair.detections_b, grouped);
    r.association = associate(r.affinity, config.accept_threshold);
    r.counts = score_frame(r.association, in.pair.detections_a, in.pair.detections_b);

    run.totals += r.counts;
    if (!r.failure.empty()) {
      ++run.failed_frames;
    }
    run.frames.push_back(std::move(r));
  }
  run.scores = micro_f1(run.totals);
  return run;
}

std::vector<FrameInput> load_frame_inputs(const DatasetLayout& layout, int camera_a, int camera_b,
                                          double scale, const FrameRange& range) {
  const auto annotations = layout.load_all_annotations(scale, range);
  auto pairs = build_frame_pairs(annotations, camera_a, camera_b, range);
  std::vector<FrameInput> out;
  out.reserve(pairs.size());
  for (auto& p : pairs) {
    FrameInput in;
    const auto path = layout.match_path(p.frame_id, camera_a, camera_b);
    try {
      in.matches = load_matches(path);
    } catch (const std::exception& e) {
      in.failure = path.string() + ": " + e.what();
    }
    in.pair = std::move(p);
    out.push_back(std::move(in));
  }
  return out;
}

Homography dataset_homography(const DatasetLayout& layout, int camera_a, int camera_b,
                              double scale, const GroundGrid& grid,
                              const RansacOptions& options) {
  const auto a = scale_calibration(layout.load_camera(camera_a), scale);
  const auto b = scale_calibration(layout.load_camera(camera_b), scale);
  return compute_pair_homography(a, b, grid, options);
}

}  // namespace mca
