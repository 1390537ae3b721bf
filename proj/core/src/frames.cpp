#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "mca/dataset.hpp"

namespace mca {

std::string to_string(const CameraPair& pair) {
  return std::to_string(pair.a) + "," + std::to_string(pair.b);
}

std::vector<FramePair> build_frame_pairs(const std::map<int, std::vector<Detection>>& annotations,
                                         int camera_a, int camera_b, const FrameRange& range) {
  if (camera_a == camera_b) {
    throw std::invalid_argument("frame pair cameras must differ");
  }
  std::vector<FramePair> pairs;
  if (range.last < range.first) {
    return pairs;
  }
  for (auto it = annotations.lower_bound(range.first);
       it != annotations.end() && it->first <= range.last; ++it) {
    FramePair fp;
    fp.frame_id = it->first;
    fp.camera_a = camera_a;
    fp.camera_b = camera_b;
    fp.detections_a = detections_for_camera(it->second, camera_a);
    fp.detections_b = detections_for_camera(it->second, camera_b);
    pairs.push_back(std::move(fp));
  }
  return pairs;
}

namespace {

std::string frame_stem(int frame_id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%08d", frame_id);
  return buf;
}

}  // namespace

std::map<int, std::string> DatasetLayout::default_camera_names() {
  return {{1, "CVLab1"}, {2, "CVLab2"}, {3, "CVLab3"}, {4, "CVLab4"},
          {5, "IDIAP1"}, {6, "IDIAP2"}, {7, "IDIAP3"}};
}

const std::string& DatasetLayout::camera_name(int camera_id) const {
  const auto it = camera_names.find(camera_id);
  if (it == camera_names.end()) {
    throw std::invalid_argument("no file name registered for camera " + std::to_string(camera_id));
  }
  return it->second;
}

std::filesystem::path DatasetLayout::intrinsic_path(int camera_id) const {
  return root / "calibrations" / "intrinsic_zero" / ("intr_" + camera_name(camera_id) + ".xml");
}

std::filesystem::path DatasetLayout::extrinsic_path(int camera_id) const {
  return root / "calibrations" / "extrinsic" / ("extr_" + camera_name(camera_id) + ".xml");
}

std::filesystem::path DatasetLayout::annotations_dir() const {
  return root / "annotations_positions";
}

std::filesystem::path DatasetLayout::annotation_path(int frame_id) const {
  return annotations_dir() / (frame_stem(frame_id) + ".json");
}

std::filesystem::path DatasetLayout::matches_dir(int camera_a, int camera_b) const {
  return root / "matches" / (std::to_string(camera_a) + "_" + std::to_string(camera_b));
}

std::filesystem::path DatasetLayout::match_path(int frame_id, int camera_a, int camera_b) const {
  return matches_dir(camera_a, camera_b) / (frame_stem(frame_id) + ".txt");
}

std::vector<int> DatasetLayout::annotated_frames() const {
  std::vector<int> frames;
  const auto dir = annotations_dir();
  if (!std::filesystem::is_directory(dir)) {
    return frames;
  }
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") {
      continue;
    }
    const std::string stem = entry.path().stem().string();
    if (stem.empty() || stem.find_first_not_of("0123456789") != std::string::npos) {
      continue;
    }
    frames.push_back(std::stoi(stem));
  }
  std::sort(frames.begin(), frames.end());
  return frames;
}

CameraCalibration DatasetLayout::load_camera(int camera_id) const {
  return load_calibrations(intrinsic_path(camera_id), extrinsic_path(camera_id), camera_id,
                           native_size, translation_scale);
}

std::map<int, std::vector<Detection>> DatasetLayout::load_all_annotations(
    double scale, const FrameRange& range) const {
  const ImageSize bounds{static_cast<int>(std::lround(native_size.width * scale)),
                         static_cast<int>(std::lround(native_size.height * scale))};
  std::map<int, std::vector<Detection>> out;
  for (const int frame : annotated_frames()) {
    if (frame < range.first || frame > range.last) {
      continue;
    }
    out.emplace(frame, load_annotations(annotation_path(frame), frame, scale, bounds));
  }
  return out;
}

}  // namespace mca
