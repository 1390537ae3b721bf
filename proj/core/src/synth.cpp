#include "mca/synth.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>

namespace mca {

void SceneSpec::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) {
      throw std::invalid_argument(std::string("scene spec: ") + what);
    }
  };
  require(n_cameras >= 2 && n_cameras <= 7, "n_cameras must be in [2, 7]");
  require(n_people >= 1, "n_people must be positive");
  require(n_frames >= 1 && frame_stride >= 1, "n_frames and frame_stride must be positive");
  require((area_max - area_min).minCoeff() > 0.0, "empty area");
  require(person_height > 0.0 && person_width > 0.0, "person size must be positive");
  require(min_separation >= 0.0 && step_sigma >= 0.0, "negative walk parameter");
  require(keypoints_per_person >= 0, "negative keypoint count");
  require(0.0 <= true_conf_min && true_conf_min <= true_conf_max && true_conf_max <= 1.0,
          "true confidence range outside [0, 1]");
  require(0.0 <= clutter_conf_min && clutter_conf_min <= clutter_conf_max &&
              clutter_conf_max <= 1.0,
          "clutter confidence range outside [0, 1]");
  require(clutter_rate >= 0.0 && noise_px >= 0.0, "negative clutter rate or noise");
  require(camera_radius > 0.0 && camera_height > 0.0 && focal_px > 0.0,
          "camera geometry must be positive");
  require(native_size.valid() && working_scale > 0.0, "bad image size or scale");
  // Packing check: rejection sampling must be able to place everyone.
  const Vec2 ext = area_max - area_min;
  require(n_people * min_separation * min_separation <= 0.25 * ext.x() * ext.y(),
          "area too small for n_people at min_separation");
}

ImageSize SceneSpec::working_size() const {
  return {static_cast<int>(std::lround(native_size.width * working_scale)),
          static_cast<int>(std::lround(native_size.height * working_scale))};
}

const MatchSet& Scene::match_set(int frame_id, const CameraPair& pair) const {
  return matches.at({frame_id, pair});
}

const CameraCalibration& Scene::camera(int camera_id) const {
  return cameras.at(static_cast<std::size_t>(camera_id - 1));
}

namespace {

// Separate, reproducible random streams per purpose and frame.
std::mt19937_64 stream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t a = 0,
                       std::uint64_t b = 0) {
  std::seed_seq seq{seed & 0xffffffffu, seed >> 32, purpose, a, b};
  return std::mt19937_64(seq);
}

CameraCalibration look_at(int id, const Vec3& center, const Vec3& target, const SceneSpec& spec) {
  const Vec3 z = (target - center).normalized();
  const Vec3 x = z.cross(Vec3::UnitZ()).normalized();
  const Vec3 y = z.cross(x);
  Mat3 R;
  R.row(0) = x.transpose();
  R.row(1) = y.transpose();
  R.row(2) = z.transpose();

  CameraCalibration c;
  c.camera_id = id;
  c.K << spec.focal_px, 0.0, 0.5 * spec.native_size.width, 0.0, spec.focal_px,
      0.5 * spec.native_size.height, 0.0, 0.0, 1.0;
  c.rvec = rotation_to_rodrigues(R);
  c.tvec = -(c.rotation() * center);
  c.image_size = spec.native_size;
  return c;
}

std::array<Vec3, 8> body_corners(const Vec2& p, const SceneSpec& spec) {
  const double h = 0.5 * spec.person_width;
  std::array<Vec3, 8> out;
  std::size_t k = 0;
  for (const double dz : {0.0, spec.person_height}) {
    for (const double dy : {-h, h}) {
      for (const double dx : {-h, h}) {
        out[k++] = Vec3(p.x() + dx, p.y() + dy, dz);
      }
    }
  }
  return out;
}

// Tight box rounded outward, or nullopt unless fully inside the image.
std::optional<ViewRecord> view_of(const Vec2& p, const CameraCalibration& cam,
                                  const SceneSpec& spec) {
  const auto corners = body_corners(p, spec);
  const auto proj = project_points(corners, cam);
  if (proj.pixels.size() != corners.size()) {
    return std::nullopt;
  }
  Vec2 lo = proj.pixels.front();
  Vec2 hi = lo;
  for (const auto& q : proj.pixels) {
    lo = lo.cwiseMin(q);
    hi = hi.cwiseMax(q);
  }
  ViewRecord v;
  v.camera_id = cam.camera_id;
  v.xmin = std::floor(lo.x());
  v.ymin = std::floor(lo.y());
  v.xmax = std::ceil(hi.x());
  v.ymax = std::ceil(hi.y());
  if (v.xmin < 0.0 || v.ymin < 0.0 || v.xmax >= cam.image_size.width ||
      v.ymax >= cam.image_size.height) {
    return std::nullopt;
  }
  return v;
}

int position_id(const Vec2& p) {
  // Index on the dataset's 480 x 1440 ground grid, -1 outside it.
  const GroundGrid g;
  const auto ix = std::lround((p.x() - g.origin.x()) / g.spacing);
  const auto iy = std::lround((p.y() - g.origin.y()) / g.spacing);
  if (ix < 0 || iy < 0 || ix >= static_cast<long>(g.cols) || iy >= static_cast<long>(g.rows)) {
    return -1;
  }
  return static_cast<int>(ix + static_cast<long>(g.cols) * iy);
}

std::vector<std::vector<Vec2>> random_walk(const SceneSpec& spec) {
  auto rng = stream(spec.seed, 1);
  std::uniform_real_distribution<double> ux(spec.area_min.x(), spec.area_max.x());
  std::uniform_real_distribution<double> uy(spec.area_min.y(), spec.area_max.y());
  std::normal_distribution<double> step(0.0, spec.step_sigma);
  const double sep2 = spec.min_separation * spec.min_separation;

  auto clear_of = [&](const std::vector<Vec2>& others, std::size_t self, const Vec2& p) {
    for (std::size_t k = 0; k < others.size(); ++k) {
      if (k != self && (others[k] - p).squaredNorm() < sep2) {
        return false;
      }
    }
    return true;
  };
  auto inside = [&](const Vec2& p) {
    return (p.array() >= spec.area_min.array()).all() && (p.array() <= spec.area_max.array()).all();
  };

  std::vector<Vec2> cur;
  for (int k = 0; k < spec.n_people; ++k) {
    for (int attempt = 0;; ++attempt) {
      if (attempt == 100000) {
        throw Error("could not place people at the requested separation");
      }
      const Vec2 p(ux(rng), uy(rng));
      if (clear_of(cur, cur.size(), p)) {
        cur.push_back(p);
        break;
      }
    }
  }

  std::vector<std::vector<Vec2>> frames{cur};
  for (int f = 1; f < spec.n_frames; ++f) {
    for (std::size_t k = 0; k < cur.size(); ++k) {
      // Keeping the old position is always valid: everyone who moved already
      // was checked against it.
      for (int attempt = 0; attempt < 50; ++attempt) {
        const Vec2 p = cur[k] + Vec2(step(rng), step(rng));
        if (inside(p) && clear_of(cur, k, p)) {
          cur[k] = p;
          break;
        }
      }
    }
    frames.push_back(cur);
  }
  return frames;
}

// True when the open segment from `from` to `to` passes through an upright
// body box centred at p (slab test).
bool segment_hits_body(const Vec3& from, const Vec3& to, const Vec2& p, const SceneSpec& spec) {
  const double h = 0.5 * spec.person_width;
  const Vec3 lo(p.x() - h, p.y() - h, 0.0);
  const Vec3 hi(p.x() + h, p.y() + h, spec.person_height);
  const Vec3 d = to - from;
  double t0 = 0.0;
  double t1 = 1.0;
  for (int k = 0; k < 3; ++k) {
    if (std::abs(d[k]) < 1e-15) {
      if (from[k] < lo[k] || from[k] > hi[k]) {
        return false;
      }
      continue;
    }
    double a = (lo[k] - from[k]) / d[k];
    double b = (hi[k] - from[k]) / d[k];
    if (a > b) {
      std::swap(a, b);
    }
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
    if (t0 >= t1) {
      return false;
    }
  }
  return true;
}

bool occluded(const Vec3& X, std::size_t owner, const Vec3& camera, const std::vector<Vec2>& pos,
              const SceneSpec& spec) {
  for (std::size_t k = 0; k < pos.size(); ++k) {
    if (k != owner && segment_hits_body(camera, X, pos[k], spec)) {
      return true;
    }
  }
  return false;
}

Vec2 sample_in_box(const BBox& b, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ux(b.xmin, b.xmax);
  std::uniform_real_distribution<double> uy(b.ymin, b.ymax);
  const double x = ux(rng);
  return {x, uy(rng)};
}

std::pair<MatchSet, std::vector<MatchTruth>> pair_matches(
    const Scene& scene, int frame_id, std::size_t frame_index, const CameraPair& pair,
    const std::vector<CameraCalibration>& working) {
  const SceneSpec& spec = scene.spec;
  auto rng = stream(spec.seed, 2, frame_index,
                    static_cast<std::uint64_t>(pair.a) * 16 + static_cast<std::uint64_t>(pair.b));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> true_conf(spec.true_conf_min, spec.true_conf_max);
  std::uniform_real_distribution<double> clutter_conf(spec.clutter_conf_min,
                                                      spec.clutter_conf_max);
  std::normal_distribution<double> noise(0.0, spec.noise_px);

  MatchSet ms;
  ms.frame_id = frame_id;
  ms.camera_a = pair.a;
  ms.camera_b = pair.b;
  ms.size_a = spec.working_size();
  ms.size_b = ms.size_a;
  ms.provenance = Provenance::Synthetic;
  std::vector<MatchTruth> truth;

  const auto& dets = scene.detections.at(frame_id);
  const auto dets_a = detections_for_camera(dets, pair.a);
  const auto dets_b = detections_for_camera(dets, pair.b);
  std::set<int> in_b;
  for (const auto& d : dets_b) {
    in_b.insert(d.person_id);
  }

  const auto& cam_a = working[static_cast<std::size_t>(pair.a - 1)];
  const auto& cam_b = working[static_cast<std::size_t>(pair.b - 1)];
  const auto& pos = scene.positions.at(frame_id);
  const Vec3 center_a = camera_center(cam_a);
  const Vec3 center_b = camera_center(cam_b);
  const double h = 0.5 * spec.person_width;
  const double lo = 0.05;
  const double hi = 0.95;
  auto clamp_to = [](Vec2 p, const ImageSize& s) {
    return Vec2(std::clamp(p.x(), 0.0, std::nextafter(static_cast<double>(s.width), 0.0)),
                std::clamp(p.y(), 0.0, std::nextafter(static_cast<double>(s.height), 0.0)));
  };

  for (const auto& d : dets_a) {
    if (!in_b.contains(d.person_id)) {
      continue;
    }
    const auto owner = static_cast<std::size_t>(d.person_id - 1);
    const Vec2& p = pos[owner];
    for (int k = 0; k < spec.keypoints_per_person; ++k) {
      const double fx = lo + (hi - lo) * unit(rng);
      const double fy = lo + (hi - lo) * unit(rng);
      const double fz = lo + (hi - lo) * unit(rng);
      const Vec3 X(p.x() - h + 2.0 * h * fx, p.y() - h + 2.0 * h * fy, spec.person_height * fz);
      const double c = true_conf(rng);
      // A matcher only sees body points that no other person hides.
      if (occluded(X, owner, center_a, pos, spec) || occluded(X, owner, center_b, pos, spec)) {
        continue;
      }
      const auto pa = project_points(std::span(&X, 1), cam_a);
      const auto pb = project_points(std::span(&X, 1), cam_b);
      if (pa.pixels.empty() || pb.pixels.empty()) {
        continue;
      }
      KeypointMatch m{pa.pixels.front(), pb.pixels.front(), c};
      if (spec.noise_px > 0.0) {
        m.pt_a = clamp_to(m.pt_a + Vec2(noise(rng), noise(rng)), ms.size_a);
        m.pt_b = clamp_to(m.pt_b + Vec2(noise(rng), noise(rng)), ms.size_b);
      }
      ms.matches.push_back(m);
      truth.push_back({d.person_id, X});
    }
  }

  const auto n_clutter = static_cast<int>(std::lround(spec.clutter_rate));
  const BBox full_a{0.0, 0.0, std::nextafter(static_cast<double>(ms.size_a.width), 0.0),
                    std::nextafter(static_cast<double>(ms.size_a.height), 0.0)};
  const BBox full_b{0.0, 0.0, std::nextafter(static_cast<double>(ms.size_b.width), 0.0),
                    std::nextafter(static_cast<double>(ms.size_b.height), 0.0)};
  for (int k = 0; k < n_clutter; ++k) {
    // Clutter lands on people so that it competes with real evidence.
    const BBox& ba = dets_a.empty()
                         ? full_a
                         : dets_a[std::uniform_int_distribution<std::size_t>(0, dets_a.size() - 1)(rng)]
                               .bbox;
    const BBox& bb = dets_b.empty()
                         ? full_b
                         : dets_b[std::uniform_int_distribution<std::size_t>(0, dets_b.size() - 1)(rng)]
                               .bbox;
    KeypointMatch m;
    m.pt_a = sample_in_box(ba, rng);
    m.pt_b = sample_in_box(bb, rng);
    m.confidence = clutter_conf(rng);
    ms.matches.push_back(m);
    truth.push_back({});
  }
  return {std::move(ms), std::move(truth)};
}

}  // namespace

Scene generate_scene(const SceneSpec& spec) {
  spec.validate();
  Scene scene;
  scene.spec = spec;

  const Vec2 mid = 0.5 * (spec.area_min + spec.area_max);
  const Vec3 target(mid.x(), mid.y(), 0.5 * spec.person_height);
  const double arc = spec.camera_arc_deg * std::numbers::pi / 180.0;
  for (int k = 0; k < spec.n_cameras; ++k) {
    const double theta = -0.5 * arc + arc * k / (spec.n_cameras - 1);
    const Vec3 center(mid.x() + spec.camera_radius * std::cos(theta - std::numbers::pi / 2),
                      mid.y() + spec.camera_radius * std::sin(theta - std::numbers::pi / 2),
                      spec.camera_height);
    auto cam = look_at(k + 1, center, target, spec);
    const auto seen = project_points(std::span(&target, 1), cam);
    if (seen.pixels.empty() || !cam.image_size.contains_strict(seen.pixels.front())) {
      throw Error("camera " + std::to_string(k + 1) + " does not see the walking area");
    }
    scene.cameras.push_back(cam);
  }
  std::vector<CameraCalibration> working;
  for (const auto& c : scene.cameras) {
    working.push_back(scale_calibration(c, spec.working_scale));
  }

  const auto walk = random_walk(spec);
  for (int f = 0; f < spec.n_frames; ++f) {
    const int frame_id = f * spec.frame_stride;
    scene.frame_ids.push_back(frame_id);
    const auto& pos = walk[static_cast<std::size_t>(f)];
    scene.positions[frame_id] = pos;

    std::vector<PersonRecord> records;
    for (int k = 0; k < spec.n_people; ++k) {
      PersonRecord r;
      r.person_id = k + 1;
      r.position_id = position_id(pos[static_cast<std::size_t>(k)]);
      for (const auto& cam : scene.cameras) {
        ViewRecord v;
        v.camera_id = cam.camera_id;
        if (auto seen = view_of(pos[static_cast<std::size_t>(k)], cam, spec)) {
          v = *seen;
        }
        r.views.push_back(v);
      }
      records.push_back(std::move(r));
    }
    scene.detections[frame_id] =
        detections_from_records(records, frame_id, spec.working_scale, spec.working_size());
    scene.records[frame_id] = std::move(records);
  }

  for (std::size_t f = 0; f < scene.frame_ids.size(); ++f) {
    const int frame_id = scene.frame_ids[f];
    for (int a = 1; a <= spec.n_cameras; ++a) {
      for (int b = a + 1; b <= spec.n_cameras; ++b) {
        auto [ms, truth] = pair_matches(scene, frame_id, f, {a, b}, working);
        scene.matches[{frame_id, CameraPair{a, b}}] = std::move(ms);
        scene.truth[{frame_id, CameraPair{a, b}}] = std::move(truth);
      }
    }
  }

  for (int a = 1; a <= spec.n_cameras; ++a) {
    for (int b = a + 1; b <= spec.n_cameras; ++b) {
      bool shared = false;
      for (const auto& p : build_frame_pairs(scene.detections, a, b)) {
        std::set<int> ids;
        for (const auto& d : p.detections_a) {
          ids.insert(d.person_id);
        }
        for (const auto& d : p.detections_b) {
          shared = shared || ids.contains(d.person_id);
        }
      }
      if (!shared) {
        throw Error("cameras " + std::to_string(a) + " and " + std::to_string(b) +
                    " never see a person in common");
      }
    }
  }
  return scene;
}

DatasetLayout scene_layout(const std::filesystem::path& root, const SceneSpec& spec) {
  DatasetLayout layout;
  layout.root = root;
  layout.native_size = spec.native_size;
  layout.translation_scale = 0.01;
  return layout;
}

DatasetLayout write_scene(const Scene& scene, const std::filesystem::path& root) {
  const DatasetLayout layout = scene_layout(root, scene.spec);
  std::filesystem::create_directories(layout.intrinsic_path(1).parent_path());
  std::filesystem::create_directories(layout.extrinsic_path(1).parent_path());
  std::filesystem::create_directories(layout.annotations_dir());
  for (const auto& cam : scene.cameras) {
    write_calibrations(cam, layout.intrinsic_path(cam.camera_id),
                       layout.extrinsic_path(cam.camera_id), layout.translation_scale);
  }
  for (const auto& [frame_id, records] : scene.records) {
    write_annotation_records(layout.annotation_path(frame_id), records);
  }
  for (const auto& [key, ms] : scene.matches) {
    const auto& [frame_id, pair] = key;
    std::filesystem::create_directories(layout.matches_dir(pair.a, pair.b));
    write_matches(layout.match_path(frame_id, pair.a, pair.b), ms);
  }
  return layout;
}

Homography scene_homography(const Scene& scene, const CameraPair& pair,
                            const RansacOptions& options) {
  const double s = scene.spec.working_scale;
  return compute_pair_homography(scale_calibration(scene.camera(pair.a), s),
                                 scale_calibration(scene.camera(pair.b), s), GroundGrid{},
                                 options);
}

std::vector<FrameInput> scene_frame_inputs(const Scene& scene, const CameraPair& pair) {
  auto pairs = build_frame_pairs(scene.detections, pair.a, pair.b);
  std::vector<FrameInput> out;
  for (auto& p : pairs) {
    FrameInput in;
    const CameraPair key{std::min(pair.a, pair.b), std::max(pair.a, pair.b)};
    in.matches = scene.match_set(p.frame_id, key);
    in.pair = std::move(p);
    out.push_back(std::move(in));
  }
  return out;
}

}  // namespace mca
