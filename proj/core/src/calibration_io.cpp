#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "mca/dataset.hpp"

namespace mca {

namespace {

namespace pt = boost::property_tree;

pt::ptree read_storage(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw ParseError("calibration file not found: " + path.string());
  }
  pt::ptree tree;
  try {
    pt::read_xml(path.string(), tree, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError("malformed calibration XML " + path.string() + ": " + e.message());
  }
  const auto storage = tree.get_child_optional("opencv_storage");
  if (!storage) {
    throw ParseError("missing <opencv_storage> root in " + path.string());
  }
  return *storage;
}

std::vector<double> parse_numbers(const std::string& text, const std::string& field,
                                  const std::filesystem::path& path) {
  std::vector<double> values;
  std::istringstream in(text);
  std::string token;
  while (in >> token) {
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size()) {
      throw ParseError("field '" + field + "' in " + path.string() + ": bad number '" + token + "'");
    }
    values.push_back(v);
  }
  return values;
}

// Reads a matrix stored either as an opencv-matrix node (rows/cols/data) or as
// plain whitespace-separated text.
std::vector<double> read_matrix(const pt::ptree& storage, const std::string& field,
                                std::size_t expected, const std::filesystem::path& path) {
  const auto node = storage.get_child_optional(field);
  if (!node) {
    throw ParseError("field '" + field + "' missing in " + path.string());
  }
  std::vector<double> values;
  if (const auto data = node->get_optional<std::string>("data")) {
    const auto rows = node->get_optional<int>("rows");
    const auto cols = node->get_optional<int>("cols");
    if (!rows || !cols) {
      throw ParseError("field '" + field + "' in " + path.string() + ": missing rows/cols");
    }
    if (static_cast<std::size_t>(*rows) * static_cast<std::size_t>(*cols) != expected) {
      throw ParseError("field '" + field + "' in " + path.string() + ": expected " +
                       std::to_string(expected) + " entries, got " + std::to_string(*rows) + "x" +
                       std::to_string(*cols));
    }
    values = parse_numbers(*data, field, path);
  } else {
    values = parse_numbers(node->get_value<std::string>(), field, path);
  }
  if (values.size() != expected) {
    throw ParseError("field '" + field + "' in " + path.string() + ": expected " +
                     std::to_string(expected) + " values, got " + std::to_string(values.size()));
  }
  return values;
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  out << text;
}

}  // namespace

CameraCalibration load_calibrations(const std::filesystem::path& intrinsic_path,
                                    const std::filesystem::path& extrinsic_path, int camera_id,
                                    const ImageSize& image_size, double translation_scale) {
  const pt::ptree intr = read_storage(intrinsic_path);
  const pt::ptree extr = read_storage(extrinsic_path);

  CameraCalibration calib;
  calib.camera_id = camera_id;
  calib.image_size = image_size;

  const auto k = read_matrix(intr, "camera_matrix", 9, intrinsic_path);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      calib.K(r, c) = k[static_cast<std::size_t>(3 * r + c)];
    }
  }
  const auto rvec = read_matrix(extr, "rvec", 3, extrinsic_path);
  const auto tvec = read_matrix(extr, "tvec", 3, extrinsic_path);
  calib.rvec = Vec3(rvec[0], rvec[1], rvec[2]);
  calib.tvec = Vec3(tvec[0], tvec[1], tvec[2]) * translation_scale;

  try {
    calib.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError("field 'camera_matrix' in " + intrinsic_path.string() + ": " + e.what());
  }
  return calib;
}

void write_calibrations(const CameraCalibration& calib, const std::filesystem::path& intrinsic_path,
                        const std::filesystem::path& extrinsic_path, double translation_scale) {
  if (!(translation_scale > 0.0)) {
    throw std::invalid_argument("translation scale must be positive");
  }
  std::ostringstream intr;
  intr << "<?xml version=\"1.0\"?>\n<opencv_storage>\n"
       << "<camera_matrix type_id=\"opencv-matrix\">\n  <rows>3</rows>\n  <cols>3</cols>\n"
       << "  <dt>d</dt>\n  <data>\n   ";
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      intr << ' ' << format_number(calib.K(r, c));
    }
  }
  intr << "</data></camera_matrix>\n"
       << "<distortion_coefficients type_id=\"opencv-matrix\">\n  <rows>1</rows>\n"
       << "  <cols>5</cols>\n  <dt>d</dt>\n  <data>\n    0. 0. 0. 0. 0.</data></distortion_coefficients>\n"
       << "</opencv_storage>\n";
  write_text(intrinsic_path, intr.str());

  std::ostringstream extr;
  extr << "<?xml version=\"1.0\"?>\n<opencv_storage>\n<rvec>";
  for (int i = 0; i < 3; ++i) {
    extr << format_number(calib.rvec[i]) << ' ';
  }
  extr << "</rvec>\n<tvec>";
  for (int i = 0; i < 3; ++i) {
    extr << format_number(calib.tvec[i] / translation_scale) << ' ';
  }
  extr << "</tvec>\n</opencv_storage>\n";
  write_text(extrinsic_path, extr.str());
}

}  // namespace mca
