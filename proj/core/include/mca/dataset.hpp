#pragma once

#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mca/camera.hpp"
#include "mca/types.hpp"

namespace mca {

// ---------------------------------------------------------------------------
// Bounding boxes and detections

struct BBox {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;

  /// Closed-interval containment (boundary counts as inside).
  [[nodiscard]] bool contains(const Vec2& p) const {
    return p.x() >= xmin && p.x() <= xmax && p.y() >= ymin && p.y() <= ymax;
  }
  [[nodiscard]] double width() const { return xmax - xmin; }
  [[nodiscard]] double height() const { return ymax - ymin; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// One person's box in one camera at one frame.
struct Detection {
  int frame_id = 0;
  int camera_id = 0;
  int person_id = 0;
  BBox bbox;

  friend bool operator==(const Detection&, const Detection&) = default;
};

// ---------------------------------------------------------------------------
// Annotation files (one JSON array per frame, WILDTRACK layout)

/// One view of a person as stored in an annotation file. Coordinates are in
/// native pixels; a view with all coordinates equal to -1 (or a negative
/// extent) marks the person as not visible in that camera.
struct ViewRecord {
  int camera_id = 0;  // 1-based; stored on disk as a 0-based viewNum
  double xmin = -1.0;
  double ymin = -1.0;
  double xmax = -1.0;
  double ymax = -1.0;

  [[nodiscard]] bool visible() const;

  friend bool operator==(const ViewRecord&, const ViewRecord&) = default;
};

struct PersonRecord {
  int person_id = 0;
  int position_id = -1;
  std::vector<ViewRecord> views;

  friend bool operator==(const PersonRecord&, const PersonRecord&) = default;
};

/// Parses an annotation document. Throws ParseError naming the record index.
[[nodiscard]] std::vector<PersonRecord> parse_annotation_records(std::string_view text);
[[nodiscard]] std::vector<PersonRecord> read_annotation_records(const std::filesystem::path& path);
[[nodiscard]] std::string format_annotation_records(const std::vector<PersonRecord>& records);
void write_annotation_records(const std::filesystem::path& path,
                              const std::vector<PersonRecord>& records);

inline constexpr ImageSize kNativeSize{1920, 1080};
inline constexpr ImageSize kWorkingSize{1280, 720};
inline constexpr double kWorkingScale = 2.0 / 3.0;

/// Converts records to detections: invisible views are skipped, coordinates
/// are multiplied by `scale` and clipped to `bounds`; boxes that collapse to
/// zero width or height are dropped with a warning. Throws ParseError if a
/// person id repeats within one camera.
[[nodiscard]] std::vector<Detection> detections_from_records(const std::vector<PersonRecord>& records,
                                                             int frame_id, double scale,
                                                             const ImageSize& bounds = kWorkingSize);

[[nodiscard]] std::vector<Detection> load_annotations(const std::filesystem::path& path,
                                                      int frame_id, double scale,
                                                      const ImageSize& bounds = kWorkingSize);

/// Detections of one camera, in file order.
[[nodiscard]] std::vector<Detection> detections_for_camera(const std::vector<Detection>& all,
                                                           int camera_id);

// ---------------------------------------------------------------------------
// Calibration files (OpenCV FileStorage XML)

/// Reads the camera matrix from `intrinsic_path` and rvec/tvec from
/// `extrinsic_path`. Distortion coefficients are ignored. Translations are
/// multiplied by `translation_scale` to obtain meters. Throws ParseError
/// naming the offending field.
[[nodiscard]] CameraCalibration load_calibrations(const std::filesystem::path& intrinsic_path,
                                                  const std::filesystem::path& extrinsic_path,
                                                  int camera_id,
                                                  const ImageSize& image_size = kNativeSize,
                                                  double translation_scale = 1.0);

/// Writes `calib` in the same schema; translation is divided by
/// `translation_scale` so that load_calibrations with the same scale round-trips.
void write_calibrations(const CameraCalibration& calib,
                        const std::filesystem::path& intrinsic_path,
                        const std::filesystem::path& extrinsic_path,
                        double translation_scale = 1.0);

// ---------------------------------------------------------------------------
// Frame pairing

struct FramePair {
  int frame_id = 0;
  int camera_a = 0;
  int camera_b = 0;
  std::vector<Detection> detections_a;
  std::vector<Detection> detections_b;
  std::optional<std::filesystem::path> image_a;
  std::optional<std::filesystem::path> image_b;
};

/// Inclusive frame id range; the default covers every frame.
struct FrameRange {
  int first = 0;
  int last = std::numeric_limits<int>::max();
};

/// One FramePair per annotated frame inside `range`, in ascending frame order.
/// Frames where a camera has no detections are kept with an empty side.
[[nodiscard]] std::vector<FramePair> build_frame_pairs(
    const std::map<int, std::vector<Detection>>& annotations, int camera_a, int camera_b,
    const FrameRange& range = {});

// ---------------------------------------------------------------------------
// On-disk dataset layout

/// Directory layout shared by WILDTRACK and the synthetic generator:
///   calibrations/intrinsic_zero/intr_<name>.xml
///   calibrations/extrinsic/extr_<name>.xml
///   annotations_positions/<frame:08d>.json
///   matches/<a>_<b>/<frame:08d>.txt
struct DatasetLayout {
  std::filesystem::path root;
  std::map<int, std::string> camera_names = default_camera_names();
  ImageSize native_size = kNativeSize;
  double translation_scale = 0.01;  // extrinsic translations are stored in centimeters

  [[nodiscard]] static std::map<int, std::string> default_camera_names();

  [[nodiscard]] const std::string& camera_name(int camera_id) const;
  [[nodiscard]] std::filesystem::path intrinsic_path(int camera_id) const;
  [[nodiscard]] std::filesystem::path extrinsic_path(int camera_id) const;
  [[nodiscard]] std::filesystem::path annotations_dir() const;
  [[nodiscard]] std::filesystem::path annotation_path(int frame_id) const;
  [[nodiscard]] std::filesystem::path matches_dir(int camera_a, int camera_b) const;
  [[nodiscard]] std::filesystem::path match_path(int frame_id, int camera_a, int camera_b) const;

  /// Frame ids of every annotation file present, ascending.
  [[nodiscard]] std::vector<int> annotated_frames() const;

  [[nodiscard]] CameraCalibration load_camera(int camera_id) const;

  /// Loads every annotation file in `range` at `scale`, keyed by frame id.
  [[nodiscard]] std::map<int, std::vector<Detection>> load_all_annotations(
      double scale, const FrameRange& range = {}) const;
};

}  // namespace mca
