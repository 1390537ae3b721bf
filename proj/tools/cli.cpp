#include "cli.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "mca/pipeline.hpp"
#include "mca/sweep.hpp"
#include "mca/synth.hpp"

namespace mca::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kVersion = "0.3.0";

struct Options {
  std::string data;
  bool synth = false;
  int cameras = 2;
  int people = 5;
  int n_frames = 20;
  int keypoints = 12;
  double clutter = 0.0;
  double noise = 0.0;

  std::vector<std::string> pairs;
  double loftr_threshold = 0.0;
  double distance_coeff = 0.0;
  double accept_threshold = 0.0;
  std::string metric = "M4";
  int window = 3;
  bool symmetric = false;
  double scale = kWorkingScale;
  double tvec_scale = 0.01;
  std::uint64_t seed = 0;
  std::string out;
  std::string frames;
  unsigned threads = 0;
  std::string associations;
  bool dump_affinity = false;
  std::vector<double> thresholds{kDefaultThresholds.begin(), kDefaultThresholds.end()};
  std::vector<double> coefficients{kDefaultCoefficients.begin(), kDefaultCoefficients.end()};
};

CameraPair parse_pair(const std::string& text) {
  const auto sep = text.find_first_of(",_-:");
  if (sep == std::string::npos) {
    throw std::invalid_argument("camera pair '" + text + "' must look like 1,4");
  }
  const int a = std::stoi(text.substr(0, sep));
  const int b = std::stoi(text.substr(sep + 1));
  return {a, b};
}

FrameRange parse_frames(const std::string& text) {
  FrameRange r;
  if (text.empty()) {
    return r;
  }
  const auto sep = text.find(':');
  if (sep == std::string::npos) {
    r.first = r.last = std::stoi(text);
    return r;
  }
  if (sep > 0) {
    r.first = std::stoi(text.substr(0, sep));
  }
  if (sep + 1 < text.size()) {
    r.last = std::stoi(text.substr(sep + 1));
  }
  if (r.first > r.last) {
    throw std::invalid_argument("empty frame range '" + text + "'");
  }
  return r;
}

std::string pair_tag(const CameraPair& p) {
  return std::to_string(p.a) + "_" + std::to_string(p.b);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << text;
}

json scene_spec_json(const SceneSpec& s) {
  return {{"n_cameras", s.n_cameras},
          {"n_people", s.n_people},
          {"n_frames", s.n_frames},
          {"frame_stride", s.frame_stride},
          {"keypoints_per_person", s.keypoints_per_person},
          {"clutter_rate", s.clutter_rate},
          {"noise_px", s.noise_px},
          {"working_scale", s.working_scale},
          {"seed", s.seed}};
}

// One data source per run: a dataset directory or an in-memory scene.
class Source {
 public:
  explicit Source(const Options& o) : opt_(o) {
    if (o.synth == !o.data.empty()) {
      throw std::invalid_argument("exactly one data source is required: --data or --synth");
    }
    if (o.synth) {
      scene_ = generate_scene(spec_from(o));
    } else {
      layout_.root = o.data;
      layout_.translation_scale = o.tvec_scale;
      if (!fs::is_directory(layout_.root)) {
        throw std::runtime_error("data directory " + o.data + " does not exist");
      }
    }
  }

  static SceneSpec spec_from(const Options& o) {
    SceneSpec s;
    s.n_cameras = o.cameras;
    s.n_people = o.people;
    s.n_frames = o.n_frames;
    s.keypoints_per_person = o.keypoints;
    s.clutter_rate = o.clutter;
    s.noise_px = o.noise;
    s.working_scale = o.scale;
    s.seed = o.seed;
    return s;
  }

  [[nodiscard]] bool synthetic() const { return scene_.has_value(); }

  [[nodiscard]] std::vector<CameraPair> default_pairs() const {
    if (!synthetic()) {
      return {kDefaultCameraPairs.begin(), kDefaultCameraPairs.end()};
    }
    std::vector<CameraPair> out;
    for (int a = 1; a <= scene_->spec.n_cameras; ++a) {
      for (int b = a + 1; b <= scene_->spec.n_cameras; ++b) {
        out.push_back({a, b});
      }
    }
    return out;
  }

  [[nodiscard]] ImageSize working_size() const {
    const ImageSize native = synthetic() ? scene_->spec.native_size : layout_.native_size;
    return {static_cast<int>(std::lround(native.width * opt_.scale)),
            static_cast<int>(std::lround(native.height * opt_.scale))};
  }

  [[nodiscard]] Homography homography(const CameraPair& p, const RansacOptions& ro) const {
    if (synthetic()) {
      return scene_homography(*scene_, p, ro);
    }
    return dataset_homography(layout_, p.a, p.b, opt_.scale, GroundGrid{}, ro);
  }

  [[nodiscard]] std::vector<FrameInput> frames(const CameraPair& p, const FrameRange& r) const {
    if (synthetic()) {
      auto all = scene_frame_inputs(*scene_, p);
      std::erase_if(all, [&](const FrameInput& f) {
        return f.pair.frame_id < r.first || f.pair.frame_id > r.last;
      });
      return all;
    }
    return load_frame_inputs(layout_, p.a, p.b, opt_.scale, r);
  }

  [[nodiscard]] json describe() const {
    if (synthetic()) {
      return {{"kind", "synthetic"}, {"spec", scene_spec_json(scene_->spec)}};
    }
    return {{"kind", "dataset"}, {"root", opt_.data}, {"translation_scale", opt_.tvec_scale}};
  }

  /// Digests of every file this run may read, keyed by path relative to root.
  [[nodiscard]] json input_digests(const std::vector<CameraPair>& pairs, const FrameRange& r,
                                   bool with_matches) const {
    json out = json::array();
    if (synthetic()) {
      return out;
    }
    std::set<fs::path> files;
    for (const auto& p : pairs) {
      for (const int c : {p.a, p.b}) {
        files.insert(layout_.intrinsic_path(c));
        files.insert(layout_.extrinsic_path(c));
      }
    }
    for (const int f : layout_.annotated_frames()) {
      if (f < r.first || f > r.last) {
        continue;
      }
      files.insert(layout_.annotation_path(f));
      if (with_matches) {
        for (const auto& p : pairs) {
          files.insert(layout_.match_path(f, p.a, p.b));
        }
      }
    }
    for (const auto& f : files) {
      if (fs::is_regular_file(f)) {
        out.push_back({{"path", fs::relative(f, layout_.root).generic_string()},
                       {"sha256", sha256_file(f)}});
      }
    }
    return out;
  }

 private:
  const Options& opt_;
  DatasetLayout layout_;
  std::optional<Scene> scene_;
};

json config_json(const Options& o, const std::vector<CameraPair>& pairs) {
  json jp = json::array();
  for (const auto& p : pairs) {
    jp.push_back({p.a, p.b});
  }
  return {{"pairs", jp},
          {"loftr_threshold", o.loftr_threshold},
          {"distance_coefficient", o.distance_coeff},
          {"metric", o.metric},
          {"window", o.window},
          {"accept_threshold", o.accept_threshold},
          {"symmetric_residual", o.symmetric},
          {"scale", o.scale},
          {"frames", o.frames},
          {"thresholds", o.thresholds},
          {"coefficients", o.coefficients}};
}

struct Manifest {
  json doc;
  std::vector<std::string> outputs;
  std::vector<std::string> failures;

  Manifest(const std::string& command, const Options& o) {
    doc = {{"tool", "mca"}, {"version", kVersion}, {"command", command}, {"seed", o.seed}};
  }

  void write(const fs::path& out_dir) {
    std::sort(outputs.begin(), outputs.end());
    doc["outputs"] = outputs;
    doc["failures"] = failures;
    write_text(out_dir / "manifest.json", doc.dump(2) + "\n");
  }
};

std::vector<CameraPair> selected_pairs(const Options& o, const Source& src) {
  if (o.pairs.empty()) {
    return src.default_pairs();
  }
  std::vector<CameraPair> out;
  for (const auto& p : o.pairs) {
    out.push_back(parse_pair(p));
  }
  return out;
}

RansacOptions ransac_options(const Options& o) {
  RansacOptions ro;
  ro.seed = o.seed;
  return ro;
}

fs::path prepare_out(const Options& o) {
  const fs::path out(o.out);
  fs::create_directories(out);
  return out;
}

// ---------------------------------------------------------------------------

int cmd_homography(const Options& o) {
  const Source src(o);
  const auto pairs = selected_pairs(o, src);
  const auto out_dir = prepare_out(o);
  Manifest manifest("homography", o);
  manifest.doc["config"] = config_json(o, pairs);
  manifest.doc["data_source"] = src.describe();
  manifest.doc["inputs"] = src.input_digests(pairs, {}, false);

  std::ostringstream summary;
  summary.precision(17);
  summary << "pair,camera_a,camera_b,inlier_count,h00,h01,h02,h10,h11,h12,h20,h21,h22,status\n";
  const ImageSize size = src.working_size();
  for (const auto& p : pairs) {
    const auto tag = pair_tag(p);
    summary << tag << ',' << p.a << ',' << p.b << ',';
    try {
      const Homography h = src.homography(p, ransac_options(o));
      std::ostringstream mat;
      mat.precision(17);
      mat << "camera_a " << p.a << "\ncamera_b " << p.b << "\ninlier_count " << h.inlier_count
          << "\n";
      for (int r = 0; r < 3; ++r) {
        mat << h.H(r, 0) << ' ' << h.H(r, 1) << ' ' << h.H(r, 2) << '\n';
      }
      write_text(out_dir / ("homography_" + tag + ".txt"), mat.str());
      manifest.outputs.push_back("homography_" + tag + ".txt");

      summary << h.inlier_count;
      for (int k = 0; k < 9; ++k) {
        summary << ',' << h.H(k / 3, k % 3);
      }
      std::string status = "ok";
      try {
        const OverlapMask mask(h, size, size);
        std::ostringstream warp;
        warp.precision(17);
        warp << "polygon,vertex,x,y\n";
        auto dump = [&](const char* name, const Polygon& poly) {
          for (std::size_t k = 0; k < poly.size(); ++k) {
            warp << name << ',' << k << ',' << poly[k].x() << ',' << poly[k].y() << '\n';
          }
        };
        dump("b_in_a", mask.warped_b_in_a());
        dump("a_in_b", mask.warped_a_in_b());
        dump("region_a", mask.region_a());
        dump("region_b", mask.region_b());
        write_text(out_dir / ("warp_" + tag + ".csv"), warp.str());
        manifest.outputs.push_back("warp_" + tag + ".csv");
      } catch (const MaskDegenerateError& e) {
        status = std::string("mask_degenerate: ") + e.what();
        manifest.failures.push_back(tag + ": " + status);
      }
      summary << ',' << status << '\n';
    } catch (const Error& e) {
      spdlog::warn("pair {}: {}", tag, e.what());
      manifest.failures.push_back(tag + ": " + e.what());
      summary << "0,,,,,,,,,,no_overlap\n";
    }
  }
  write_text(out_dir / "homographies.csv", summary.str());
  manifest.outputs.push_back("homographies.csv");
  manifest.write(out_dir);
  std::cout << "wrote " << pairs.size() << " homographies to " << out_dir.string() << '\n';
  return 0;
}

PipelineConfig pipeline_config(const Options& o) {
  PipelineConfig c;
  c.loftr_threshold = o.loftr_threshold;
  c.distance_coefficient = o.distance_coeff;
  c.metric = parse_metric(o.metric);
  c.window = o.window;
  c.accept_threshold = o.accept_threshold;
  c.symmetric_residual = o.symmetric;
  return c;
}

void write_frame_scores(std::ostream& out, const std::vector<FrameResult>& frames) {
  out << "frame_id,tp,fp,fn,precision,recall,f1,matches_in,matches_kept,failure\n";
  out.precision(17);
  for (const auto& f : frames) {
    const Scores s = micro_f1(f.counts);
    std::string why = f.failure;
    std::replace(why.begin(), why.end(), ',', ';');
    out << f.frame_id << ',' << f.counts.tp << ',' << f.counts.fp << ',' << f.counts.fn << ','
        << s.precision << ',' << s.recall << ',' << s.f1 << ',' << f.matches_in << ','
        << f.matches_kept << ',' << why << '\n';
  }
}

// Zero-prediction run for a pair that has no usable homography.
PairRun empty_run(const std::vector<FrameInput>& frames, const std::string& failure) {
  PairRun run;
  for (const auto& in : frames) {
    FrameResult r;
    r.frame_id = in.pair.frame_id;
    r.counts = score_frame({}, in.pair.detections_a, in.pair.detections_b);
    r.failure = failure;
    run.totals += r.counts;
    ++run.failed_frames;
    run.frames.push_back(std::move(r));
  }
  run.scores = micro_f1(run.totals);
  return run;
}

int cmd_associate(const Options& o) {
  const Source src(o);
  if (o.pairs.empty() && !src.synthetic()) {
    throw std::invalid_argument("--pair is required with --data");
  }
  const auto pairs = o.pairs.empty() ? std::vector<CameraPair>{{1, 2}} : selected_pairs(o, src);
  const auto range = parse_frames(o.frames);
  const auto out_dir = prepare_out(o);
  const PipelineConfig config = pipeline_config(o);
  Manifest manifest("associate", o);
  manifest.doc["config"] = config_json(o, pairs);
  manifest.doc["data_source"] = src.describe();
  manifest.doc["inputs"] = src.input_digests(pairs, range, true);

  std::ostringstream summary;
  summary.precision(17);
  summary << "pair,tp,fp,fn,precision,recall,f1,failed_frames\n";
  const ImageSize size = src.working_size();
  for (const auto& p : pairs) {
    const auto tag = pair_tag(p);
    const auto frames = src.frames(p, range);
    PairRun run;
    try {
      const PairContext ctx = make_pair_context(src.homography(p, ransac_options(o)), size, size);
      run = run_pair(ctx, frames, config);
    } catch (const Error& e) {
      spdlog::warn("pair {}: {}", tag, e.what());
      run = empty_run(frames, e.what());
    }
    for (const auto& f : run.frames) {
      if (!f.failure.empty()) {
        spdlog::warn("pair {} frame {}: {}", tag, f.frame_id, f.failure);
        manifest.failures.push_back(tag + " frame " + std::to_string(f.frame_id) + ": " +
                                    f.failure);
      }
    }

    std::ostringstream assoc;
    std::ostringstream aff;
    bool header = true;
    for (const auto& f : run.frames) {
      write_associations(assoc, f.association, f.affinity, header);
      if (o.dump_affinity) {
        write_affinity(aff, f.affinity, header);
      }
      header = false;
    }
    if (header) {
      assoc << "frame_id,det_a,det_b,person_a,person_b,affinity\n";
    }
    write_text(out_dir / ("associations_" + tag + ".csv"), assoc.str());
    manifest.outputs.push_back("associations_" + tag + ".csv");
    if (o.dump_affinity) {
      write_text(out_dir / ("affinity_" + tag + ".csv"), aff.str());
      manifest.outputs.push_back("affinity_" + tag + ".csv");
    }
    std::ostringstream scores;
    write_frame_scores(scores, run.frames);
    write_text(out_dir / ("scores_" + tag + ".csv"), scores.str());
    manifest.outputs.push_back("scores_" + tag + ".csv");

    summary << tag << ',' << run.totals.tp << ',' << run.totals.fp << ',' << run.totals.fn << ','
            << run.scores.precision << ',' << run.scores.recall << ',' << run.scores.f1 << ','
            << run.failed_frames << '\n';
    std::cout << "pair " << tag << ": precision " << run.scores.precision << " recall "
              << run.scores.recall << " f1 " << run.scores.f1 << " (" << run.frames.size()
              << " frames, " << run.failed_frames << " failed)\n";
  }
  write_text(out_dir / "summary.csv", summary.str());
  manifest.outputs.push_back("summary.csv");
  manifest.write(out_dir);
  return 0;
}

int cmd_sweep(const Options& o) {
  const Source src(o);
  const auto pairs = selected_pairs(o, src);
  const auto range = parse_frames(o.frames);
  const auto out_dir = prepare_out(o);
  const auto grid = sweep_grid(o.thresholds, o.coefficients);
  SweepOptions so;
  so.window = o.window;
  so.accept_threshold = o.accept_threshold;
  so.symmetric_residual = o.symmetric;
  so.threads = o.threads;

  Manifest manifest("sweep", o);
  manifest.doc["config"] = config_json(o, pairs);
  manifest.doc["data_source"] = src.describe();
  manifest.doc["inputs"] = src.input_digests(pairs, range, true);

  std::vector<SweepRow> all;
  const ImageSize size = src.working_size();
  for (const auto& p : pairs) {
    const auto tag = pair_tag(p);
    const auto frames = src.frames(p, range);
    std::vector<SweepRow> rows;
    try {
      const PairContext ctx = make_pair_context(src.homography(p, ransac_options(o)), size, size);
      rows = run_sweep(ctx, frames, grid, so);
    } catch (const Error& e) {
      spdlog::warn("pair {}: {}", tag, e.what());
      rows = failed_sweep(p, grid, frames, e.what());
    }
    std::size_t failed = 0;
    for (const auto& r : rows) {
      if (!r.failure.empty()) {
        ++failed;
      }
    }
    if (failed > 0) {
      manifest.failures.push_back(tag + ": " + std::to_string(failed) +
                                  " configs with failed frames (" + rows.front().failure + ")");
    }
    std::cout << "pair " << tag << ": best f1 " << rows.front().scores.f1 << " at threshold "
              << rows.front().config.loftr_threshold << " coefficient "
              << rows.front().config.distance_coefficient << ' '
              << to_string(rows.front().config.metric) << '\n';
    all.insert(all.end(), rows.begin(), rows.end());
  }

  std::ostringstream csv;
  write_sweep_csv(csv, all);
  write_text(out_dir / "sweep.csv", csv.str());
  write_text(out_dir / "sweep.json", sweep_json(all));
  std::ostringstream best;
  write_best_summary(best, all);
  write_text(out_dir / "best.csv", best.str());
  std::ostringstream surface;
  write_f1_surface(surface, all);
  write_text(out_dir / "f1_surface.csv", surface.str());
  manifest.outputs = {"best.csv", "f1_surface.csv", "sweep.csv", "sweep.json"};
  manifest.doc["rows"] = all.size();
  manifest.write(out_dir);
  std::cout << all.size() << " sweep rows written to " << out_dir.string() << '\n';
  return 0;
}

int cmd_synth(const Options& o) {
  const SceneSpec spec = Source::spec_from(o);
  const Scene scene = generate_scene(spec);
  const auto out_dir = prepare_out(o);
  write_scene(scene, out_dir);
  Manifest manifest("synth", o);
  manifest.doc["data_source"] = {{"kind", "synthetic"}, {"spec", scene_spec_json(spec)}};
  manifest.write(out_dir);
  std::cout << "scene with " << scene.frame_ids.size() << " frames and " << scene.cameras.size()
            << " cameras written to " << out_dir.string() << '\n';
  return 0;
}

int cmd_score(const Options& o) {
  const Source src(o);
  if (o.pairs.size() != 1) {
    throw std::invalid_argument("score needs exactly one --pair");
  }
  const CameraPair p = parse_pair(o.pairs.front());
  const auto range = parse_frames(o.frames);
  std::ifstream in(o.associations, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open associations file " + o.associations);
  }
  std::stringstream text;
  text << in.rdbuf();
  const auto predicted = parse_associations(text.str());
  const auto out_dir = prepare_out(o);

  Manifest manifest("score", o);
  manifest.doc["config"] = config_json(o, {p});
  manifest.doc["data_source"] = src.describe();
  json inputs = src.input_digests({p}, range, false);
  inputs.push_back({{"path", o.associations}, {"sha256", sha256_file(o.associations)}});
  manifest.doc["inputs"] = inputs;

  std::vector<FrameResult> results;
  EvalCounts totals;
  for (const auto& f : src.frames(p, range)) {
    FrameResult r;
    r.frame_id = f.pair.frame_id;
    if (const auto it = predicted.find(r.frame_id); it != predicted.end()) {
      for (const auto& pair : it->second.pairs) {
        if (pair.index_a >= f.pair.detections_a.size() ||
            pair.index_b >= f.pair.detections_b.size()) {
          throw ValidationError("frame " + std::to_string(r.frame_id) +
                                    ": detection index out of range",
                                0);
        }
      }
      r.association = it->second;
    }
    r.counts = score_frame(r.association, f.pair.detections_a, f.pair.detections_b);
    totals += r.counts;
    results.push_back(std::move(r));
  }
  const Scores s = micro_f1(totals);
  const auto tag = pair_tag(p);
  std::ostringstream scores;
  write_frame_scores(scores, results);
  write_text(out_dir / ("scores_" + tag + ".csv"), scores.str());
  manifest.outputs.push_back("scores_" + tag + ".csv");
  manifest.write(out_dir);
  std::cout << "pair " << tag << ": tp " << totals.tp << " fp " << totals.fp << " fn "
            << totals.fn << " precision " << s.precision << " recall " << s.recall << " f1 "
            << s.f1 << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

void add_scene(CLI::App* sub, Options& o) {
  sub->add_option("--cameras", o.cameras, "Synthetic: number of cameras")->check(CLI::Range(2, 7));
  sub->add_option("--people", o.people, "Synthetic: number of people")->check(CLI::PositiveNumber);
  sub->add_option("--n-frames", o.n_frames, "Synthetic: number of frames")
      ->check(CLI::PositiveNumber);
  sub->add_option("--keypoints", o.keypoints, "Synthetic: true keypoints per person")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--clutter", o.clutter, "Synthetic: false matches per frame and pair")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--noise", o.noise, "Synthetic: match coordinate noise sigma (px)")
      ->check(CLI::NonNegativeNumber);
}

void add_source(CLI::App* sub, Options& o) {
  auto* data = sub->add_option("--data", o.data,
                               "Dataset root (calibrations/, annotations_positions/, matches/)");
  auto* synth = sub->add_flag("--synth", o.synth, "Use a generated scene instead of a dataset");
  data->excludes(synth);
  sub->add_option("--tvec-scale", o.tvec_scale, "Factor converting stored translations to meters")
      ->check(CLI::PositiveNumber);
  add_scene(sub, o);
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--out", o.out, "Output directory")->required();
  sub->add_option("--seed", o.seed, "Seed for RANSAC and scene generation");
  sub->add_option("--scale", o.scale, "Working resolution scale")->check(CLI::PositiveNumber);
  sub->add_option("--pair", o.pairs, "Camera pair a,b (repeatable)");
  sub->add_option("--frames", o.frames, "Inclusive frame range first:last");
}

void add_pipeline(CLI::App* sub, Options& o, bool single) {
  if (single) {
    sub->add_option("--loftr-threshold", o.loftr_threshold, "Minimum match confidence")
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--distance-coeff", o.distance_coeff, "Gaussian refactoring sigma (0 = off)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--metric", o.metric, "Affinity metric")
        ->check(CLI::IsMember({"M4", "M5", "m4", "m5"}));
  }
  sub->add_option("--window", o.window, "M5 window in annotated frames")
      ->check(CLI::PositiveNumber);
  sub->add_option("--accept-threshold", o.accept_threshold,
                  "Drop assigned pairs with affinity <= this")
      ->check(CLI::Range(0.0, 1.0));
  sub->add_flag("--symmetric", o.symmetric, "Average forward and backward residuals");
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Multi-camera person association"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "TOML/INI configuration file; command-line flags win");
  app.require_subcommand(1);
  Options o;

  auto* homography = app.add_subcommand("homography", "Plane-induced homographies and warp polygons");
  add_source(homography, o);
  add_common(homography, o);

  auto* associate = app.add_subcommand("associate", "Run one configuration and score it");
  add_source(associate, o);
  add_common(associate, o);
  add_pipeline(associate, o, true);
  associate->add_flag("--dump-affinity", o.dump_affinity, "Also write affinity matrices");

  auto* sweep = app.add_subcommand("sweep", "Evaluate the hyperparameter grid per camera pair");
  add_source(sweep, o);
  add_common(sweep, o);
  add_pipeline(sweep, o, false);
  sweep->add_option("--thresholds", o.thresholds, "Confidence thresholds of the grid");
  sweep->add_option("--coefficients", o.coefficients, "Refactoring coefficients of the grid");
  sweep->add_option("--threads", o.threads, "Worker threads (0 = all cores)");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  add_scene(synth, o);
  synth->add_option("--out", o.out, "Output directory")->required();
  synth->add_option("--seed", o.seed, "Scene seed");
  synth->add_option("--scale", o.scale, "Working resolution scale of the match files")
      ->check(CLI::PositiveNumber);

  auto* score = app.add_subcommand("score", "Score an associations file against annotations");
  add_source(score, o);
  add_common(score, o);
  score->add_option("--associations", o.associations, "File written by `associate`")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*homography) {
      return cmd_homography(o);
    }
    if (*associate) {
      return cmd_associate(o);
    }
    if (*sweep) {
      return cmd_sweep(o);
    }
    if (*synth) {
      return cmd_synth(o);
    }
    return cmd_score(o);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
}

}  // namespace mca::cli
