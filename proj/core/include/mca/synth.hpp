#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <utility>
#include <vector>

#include "mca/camera.hpp"
#include "mca/dataset.hpp"
#include "mca/matches.hpp"
#include "mca/pipeline.hpp"

namespace mca {

/// Parameters of a synthetic scene. People are upright boxes (width x width x
/// height) doing a random walk on the ground plane z = 0; cameras sit on a
/// circle around the walking area and look at its centre.
struct SceneSpec {
  int n_cameras = 2;
  int n_people = 5;
  int n_frames = 20;
  int frame_stride = 5;

  Vec2 area_min{-3.0, 3.0};
  Vec2 area_max{9.0, 15.0};
  double person_height = 1.8;
  double person_width = 0.5;
  double min_separation = 1.5;
  double step_sigma = 0.3;  // meters per frame

  int keypoints_per_person = 12;
  double true_conf_min = 0.7;
  double true_conf_max = 1.0;
  double clutter_rate = 0.0;  // false matches per frame and camera pair
  double clutter_conf_min = 0.0;
  double clutter_conf_max = 0.5;
  double noise_px = 0.0;  // Gaussian sigma on true match coordinates

  double camera_radius = 11.0;
  double camera_height = 8.0;
  double camera_arc_deg = 90.0;  // angular spread between first and last camera
  double focal_px = 2200.0;      // at native resolution
  ImageSize native_size = kNativeSize;
  double working_scale = kWorkingScale;

  std::uint64_t seed = 0;

  /// Throws std::invalid_argument.
  void validate() const;
  [[nodiscard]] ImageSize working_size() const;
};

/// Where a generated match came from: the world point of a true match, or
/// person_id 0 for clutter.
struct MatchTruth {
  int person_id = 0;
  Vec3 world = Vec3::Zero();
};

struct Scene {
  SceneSpec spec;
  std::vector<CameraCalibration> cameras;  // native resolution, ids 1..n
  std::vector<int> frame_ids;
  std::map<int, std::vector<Vec2>> positions;  // ground position per person, index = id - 1
  std::map<int, std::vector<PersonRecord>> records;  // native-resolution annotations
  std::map<int, std::vector<Detection>> detections;  // working resolution
  std::map<std::pair<int, CameraPair>, MatchSet> matches;  // pairs with a < b
  std::map<std::pair<int, CameraPair>, std::vector<MatchTruth>> truth;  // parallel to matches

  [[nodiscard]] const MatchSet& match_set(int frame_id, const CameraPair& pair) const;
  [[nodiscard]] const CameraCalibration& camera(int camera_id) const;
};

/// Deterministic in `spec`. Throws Error when a camera cannot see the centre
/// of the walking area or a camera pair never sees a person in common.
[[nodiscard]] Scene generate_scene(const SceneSpec& spec);

/// Layout under which write_scene stores a scene.
[[nodiscard]] DatasetLayout scene_layout(const std::filesystem::path& root,
                                         const SceneSpec& spec = {});

/// Writes calibrations, annotations and match files in the dataset formats.
DatasetLayout write_scene(const Scene& scene, const std::filesystem::path& root);

/// Working-resolution homography a -> b estimated from the default grid.
[[nodiscard]] Homography scene_homography(const Scene& scene, const CameraPair& pair,
                                          const RansacOptions& options = {});

/// In-memory equivalent of load_frame_inputs for a generated scene.
[[nodiscard]] std::vector<FrameInput> scene_frame_inputs(const Scene& scene,
                                                         const CameraPair& pair);

}  // namespace mca
