#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "mca/dataset.hpp"

namespace mca {

namespace {

using nlohmann::json;

double number_field(const json& obj, const char* key, std::size_t record) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw ParseError("annotation record " + std::to_string(record) + ": missing numeric field '" +
                     key + "'");
  }
  return it->get<double>();
}

int int_field(const json& obj, const char* key, std::size_t record) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number_integer()) {
    throw ParseError("annotation record " + std::to_string(record) + ": missing integer field '" +
                     key + "'");
  }
  return it->get<int>();
}

json coordinate(double v) {
  double ip = 0.0;
  if (std::modf(v, &ip) == 0.0 && std::abs(v) < 1e15) {
    return json(static_cast<long long>(v));
  }
  return json(v);
}

}  // namespace

bool ViewRecord::visible() const {
  if (xmin == -1.0 && ymin == -1.0 && xmax == -1.0 && ymax == -1.0) {
    return false;
  }
  return xmax >= xmin && ymax >= ymin;
}

std::vector<PersonRecord> parse_annotation_records(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed annotation JSON: ") + e.what());
  }
  if (!doc.is_array()) {
    throw ParseError("annotation document must be a JSON array of person records");
  }
  std::vector<PersonRecord> records;
  records.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& item = doc[i];
    if (!item.is_object()) {
      throw ParseError("annotation record " + std::to_string(i) + ": not an object");
    }
    PersonRecord rec;
    rec.person_id = int_field(item, "personID", i);
    if (item.contains("positionID") && item["positionID"].is_number_integer()) {
      rec.position_id = item["positionID"].get<int>();
    }
    const auto views = item.find("views");
    if (views == item.end() || !views->is_array()) {
      throw ParseError("annotation record " + std::to_string(i) + ": missing 'views' array");
    }
    for (const json& v : *views) {
      if (!v.is_object()) {
        throw ParseError("annotation record " + std::to_string(i) + ": view is not an object");
      }
      ViewRecord view;
      view.camera_id = int_field(v, "viewNum", i) + 1;
      view.xmin = number_field(v, "xmin", i);
      view.ymin = number_field(v, "ymin", i);
      view.xmax = number_field(v, "xmax", i);
      view.ymax = number_field(v, "ymax", i);
      rec.views.push_back(view);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<PersonRecord> read_annotation_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open annotation file " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_annotation_records(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string format_annotation_records(const std::vector<PersonRecord>& records) {
  json doc = json::array();
  for (const auto& rec : records) {
    json views = json::array();
    for (const auto& v : rec.views) {
      views.push_back({{"viewNum", v.camera_id - 1},
                       {"xmax", coordinate(v.xmax)},
                       {"xmin", coordinate(v.xmin)},
                       {"ymax", coordinate(v.ymax)},
                       {"ymin", coordinate(v.ymin)}});
    }
    doc.push_back({{"personID", rec.person_id}, {"positionID", rec.position_id}, {"views", views}});
  }
  return doc.dump(4) + "\n";
}

void write_annotation_records(const std::filesystem::path& path,
                              const std::vector<PersonRecord>& records) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  out << format_annotation_records(records);
}

std::vector<Detection> detections_from_records(const std::vector<PersonRecord>& records,
                                               int frame_id, double scale,
                                               const ImageSize& bounds) {
  if (!(scale > 0.0)) {
    throw std::invalid_argument("annotation scale must be positive");
  }
  std::vector<Detection> out;
  std::set<std::pair<int, int>> seen;  // (camera, person)
  for (std::size_t i = 0; i < records.size(); ++i) {
    const PersonRecord& rec = records[i];
    for (const ViewRecord& view : rec.views) {
      if (!view.visible()) {
        continue;
      }
      if (!seen.emplace(view.camera_id, rec.person_id).second) {
        throw ParseError("annotation record " + std::to_string(i) + ": person " +
                         std::to_string(rec.person_id) + " repeated in camera " +
                         std::to_string(view.camera_id));
      }
      BBox box{view.xmin * scale, view.ymin * scale, view.xmax * scale, view.ymax * scale};
      box.xmin = std::clamp(box.xmin, 0.0, static_cast<double>(bounds.width));
      box.xmax = std::clamp(box.xmax, 0.0, static_cast<double>(bounds.width));
      box.ymin = std::clamp(box.ymin, 0.0, static_cast<double>(bounds.height));
      box.ymax = std::clamp(box.ymax, 0.0, static_cast<double>(bounds.height));
      if (!(box.width() > 0.0) || !(box.height() > 0.0)) {
        spdlog::warn("frame {}: dropping degenerate box of person {} in camera {}", frame_id,
                     rec.person_id, view.camera_id);
        continue;
      }
      out.push_back(Detection{frame_id, view.camera_id, rec.person_id, box});
    }
  }
  return out;
}

std::vector<Detection> load_annotations(const std::filesystem::path& path, int frame_id,
                                        double scale, const ImageSize& bounds) {
  return detections_from_records(read_annotation_records(path), frame_id, scale, bounds);
}

std::vector<Detection> detections_for_camera(const std::vector<Detection>& all, int camera_id) {
  std::vector<Detection> out;
  std::copy_if(all.begin(), all.end(), std::back_inserter(out),
               [camera_id](const Detection& d) { return d.camera_id == camera_id; });
  return out;
}

}  // namespace mca
