#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "mca/pipeline.hpp"
#include "mca/synth.hpp"
#include "temp_dir.hpp"

using namespace mca;

namespace {

const Scene& clean_scene() {
  static const Scene scene = [] {
    SceneSpec spec;
    spec.n_frames = 12;
    return generate_scene(spec);
  }();
  return scene;
}

PairContext context(const Scene& scene, const CameraPair& pair) {
  return make_pair_context(scene_homography(scene, pair), scene.spec.working_size(),
                           scene.spec.working_size());
}

}  // namespace

TEST(Pipeline, CleanSceneIsPerfect) {
  const Scene& scene = clean_scene();
  const CameraPair pair{1, 2};
  const auto ctx = context(scene, pair);
  const auto frames = scene_frame_inputs(scene, pair);
  for (const auto metric : {AffinityMetric::M4, AffinityMetric::M5}) {
    PipelineConfig config;
    config.metric = metric;
    const PairRun run = run_pair(ctx, frames, config);
    EXPECT_EQ(run.frames.size(), frames.size());
    EXPECT_EQ(run.failed_frames, 0u);
    EXPECT_GT(run.totals.tp, 0u);
    EXPECT_EQ(run.totals.fp, 0u);
    EXPECT_EQ(run.totals.fn, 0u);
    EXPECT_DOUBLE_EQ(run.scores.f1, 1.0);
  }
}

TEST(Pipeline, TotalsAreSumOfFrames) {
  const Scene& scene = clean_scene();
  const auto ctx = context(scene, {1, 2});
  PipelineConfig config;
  config.loftr_threshold = 0.8;
  config.distance_coefficient = 5.0;
  const PairRun run = run_pair(ctx, scene_frame_inputs(scene, {1, 2}), config);
  EvalCounts sum;
  for (const auto& f : run.frames) {
    sum += f.counts;
    EXPECT_LE(f.matches_kept, f.matches_in);
  }
  EXPECT_EQ(sum, run.totals);
}

TEST(Pipeline, MissingMatchesPredictNothing) {
  const Scene& scene = clean_scene();
  const auto ctx = context(scene, {1, 2});
  auto frames = scene_frame_inputs(scene, {1, 2});
  for (auto& f : frames) {
    f.matches.reset();
    f.failure = "matches unavailable";
  }
  const PairRun run = run_pair(ctx, frames, {});
  EXPECT_EQ(run.failed_frames, frames.size());
  EXPECT_EQ(run.totals.tp, 0u);
  EXPECT_EQ(run.totals.fp, 0u);
  EXPECT_GT(run.totals.fn, 0u);
  EXPECT_EQ(run.scores.recall, 0.0);
  EXPECT_EQ(run.frames[0].failure, "matches unavailable");
}

TEST(Pipeline, ReversedMatchSetIsSwapped) {
  const Scene& scene = clean_scene();
  const auto ctx = context(scene, {1, 2});
  auto frames = scene_frame_inputs(scene, {1, 2});
  const PairRun forward = run_pair(ctx, frames, {});
  for (auto& f : frames) {
    MatchSet& ms = *f.matches;
    std::swap(ms.camera_a, ms.camera_b);
    std::swap(ms.size_a, ms.size_b);
    for (auto& m : ms.matches) {
      std::swap(m.pt_a, m.pt_b);
    }
  }
  const PairRun reversed = run_pair(ctx, frames, {});
  EXPECT_EQ(reversed.failed_frames, 0u);
  EXPECT_EQ(reversed.totals, forward.totals);
}

TEST(Pipeline, MismatchedMatchSetIsAFailure) {
  const Scene& scene = clean_scene();
  const auto ctx = context(scene, {1, 2});
  auto frames = scene_frame_inputs(scene, {1, 2});
  frames[0].matches->size_a = {640, 360};
  frames[1].matches->camera_b = 7;
  const PairRun run = run_pair(ctx, frames, {});
  EXPECT_EQ(run.failed_frames, 2u);
  EXPECT_FALSE(run.frames[0].failure.empty());
  EXPECT_FALSE(run.frames[1].failure.empty());
  EXPECT_TRUE(run.frames[0].association.pairs.empty());
}

TEST(Pipeline, LoadFromDiskEqualsInMemory) {
  const Scene& scene = clean_scene();
  testing_support::TempDir tmp;
  const DatasetLayout layout = write_scene(scene, tmp.path());
  const CameraPair pair{1, 2};
  const auto disk = load_frame_inputs(layout, 1, 2, scene.spec.working_scale);
  const auto mem = scene_frame_inputs(scene, pair);
  ASSERT_EQ(disk.size(), mem.size());
  for (std::size_t k = 0; k < disk.size(); ++k) {
    EXPECT_EQ(disk[k].pair.frame_id, mem[k].pair.frame_id);
    ASSERT_TRUE(disk[k].matches.has_value());
    EXPECT_EQ(disk[k].matches->matches, mem[k].matches->matches);
    ASSERT_EQ(disk[k].pair.detections_a.size(), mem[k].pair.detections_a.size());
    for (std::size_t d = 0; d < disk[k].pair.detections_a.size(); ++d) {
      EXPECT_EQ(disk[k].pair.detections_a[d].person_id, mem[k].pair.detections_a[d].person_id);
      EXPECT_NEAR(disk[k].pair.detections_a[d].bbox.xmin, mem[k].pair.detections_a[d].bbox.xmin,
                  1e-9);
    }
  }
  const Homography hd = dataset_homography(layout, 1, 2, scene.spec.working_scale);
  const Homography hm = scene_homography(scene, pair);
  EXPECT_LT((hd.H - hm.H).cwiseAbs().maxCoeff(), 1e-6 * hm.H.cwiseAbs().maxCoeff());
}

TEST(Pipeline, EmptyMatchDirectoryGivesZeroRecall) {
  const Scene& scene = clean_scene();
  testing_support::TempDir tmp;
  const DatasetLayout layout = write_scene(scene, tmp.path());
  std::filesystem::remove_all(layout.matches_dir(1, 2));
  std::filesystem::create_directories(layout.matches_dir(1, 2));
  const auto frames = load_frame_inputs(layout, 1, 2, scene.spec.working_scale);
  for (const auto& f : frames) {
    EXPECT_FALSE(f.matches.has_value());
    EXPECT_FALSE(f.failure.empty());
  }
  const PairRun run = run_pair(context(scene, {1, 2}), frames, {});
  EXPECT_EQ(run.scores.recall, 0.0);
  EXPECT_EQ(run.failed_frames, frames.size());
}

TEST(Pipeline, CorruptMatchFileIsAFailure) {
  const Scene& scene = clean_scene();
  testing_support::TempDir tmp;
  const DatasetLayout layout = write_scene(scene, tmp.path());
  const int frame = scene.frame_ids.front();
  {
    std::ofstream(layout.match_path(frame, 1, 2)) << "garbage\n";
  }
  const auto frames = load_frame_inputs(layout, 1, 2, scene.spec.working_scale);
  EXPECT_FALSE(frames.front().matches.has_value());
  EXPECT_FALSE(frames.front().failure.empty());
  EXPECT_TRUE(frames.back().matches.has_value());
}

TEST(Pipeline, ContextRejectsDegenerateHomography) {
  Homography h;
  h.H.setZero();
  EXPECT_THROW((void)make_pair_context(h, kWorkingSize, kWorkingSize), MaskDegenerateError);
}
