#include "mca/matches.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mca {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') {
    s.remove_prefix(1);
  }
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && !s.empty();
}

bool parse_int(std::string_view s, int& out) {
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && !s.empty();
}

ImageSize parse_size(std::string_view value, std::string_view key) {
  const auto x = value.find('x');
  ImageSize size;
  if (x == std::string_view::npos || !parse_int(value.substr(0, x), size.width) ||
      !parse_int(value.substr(x + 1), size.height) || !size.valid()) {
    throw ParseError("match header: bad image size for '" + std::string(key) + "'");
  }
  return size;
}

void parse_header(std::string_view line, MatchSet& ms) {
  std::istringstream in{std::string(line)};
  std::string magic;
  int version = 0;
  if (!(in >> magic) || magic != kMatchMagic) {
    throw ParseError("match header must start with " + std::string(kMatchMagic));
  }
  if (!(in >> version) || version != kMatchFormatVersion) {
    throw ParseError("unsupported match format version");
  }
  bool have_frame = false;
  bool have_a = false;
  bool have_b = false;
  bool have_sa = false;
  bool have_sb = false;
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) {
      throw ParseError("match header: expected key=value, got '" + token + "'");
    }
    const std::string_view key = std::string_view(token).substr(0, eq);
    const std::string_view value = std::string_view(token).substr(eq + 1);
    if (key == "frame_id") {
      have_frame = parse_int(value, ms.frame_id);
    } else if (key == "camera_a") {
      have_a = parse_int(value, ms.camera_a);
    } else if (key == "camera_b") {
      have_b = parse_int(value, ms.camera_b);
    } else if (key == "size_a") {
      ms.size_a = parse_size(value, key);
      have_sa = true;
    } else if (key == "size_b") {
      ms.size_b = parse_size(value, key);
      have_sb = true;
    } else {
      throw ParseError("match header: unknown key '" + std::string(key) + "'");
    }
  }
  if (!have_frame || !have_a || !have_b || !have_sa || !have_sb) {
    throw ParseError("match header: frame_id, camera_a, camera_b, size_a and size_b are required");
  }
  if (ms.camera_a == ms.camera_b) {
    throw ParseError("match header: camera_a and camera_b must differ");
  }
}

KeypointMatch parse_record(std::string_view line, std::size_t row) {
  double v[5];
  std::size_t field = 0;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    const auto piece = line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                          : comma - start);
    if (field >= 5) {
      throw ValidationError("match record has more than 5 columns", row);
    }
    if (!parse_double(piece, v[field])) {
      throw ValidationError("match record: bad number '" + std::string(trim(piece)) + "'", row);
    }
    ++field;
    if (comma == std::string_view::npos) {
      break;
    }
    start = comma + 1;
  }
  if (field != 5) {
    throw ValidationError("match record must have 5 columns, got " + std::to_string(field), row);
  }
  for (int i = 0; i < 4; ++i) {
    if (!std::isfinite(v[i])) {
      throw ValidationError("match record has a non-finite coordinate", row);
    }
  }
  if (!(v[4] >= 0.0 && v[4] <= 1.0)) {
    throw ValidationError("match confidence outside [0, 1]", row);
  }
  return KeypointMatch{Vec2(v[0], v[1]), Vec2(v[2], v[3]), v[4]};
}

void append_number(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

MatchSet parse_matches(std::string_view text) {
  MatchSet ms;
  ms.provenance = Provenance::File;
  std::size_t row = 0;
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto line = trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                                          : nl - pos));
    ++row;
    if (!header_seen) {
      if (line.empty()) {
        throw ParseError("match file is missing its header line");
      }
      parse_header(line, ms);
      header_seen = true;
    } else if (!line.empty()) {
      ms.matches.push_back(parse_record(line, row));
    }
    if (nl == std::string_view::npos) {
      break;
    }
    pos = nl + 1;
  }
  if (!header_seen) {
    throw ParseError("match file is missing its header line");
  }
  return ms;
}

MatchSet load_matches(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open match file " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_matches(buf.str());
}

void write_matches(std::ostream& out, const MatchSet& ms) {
  std::string text;
  text.reserve(64 + ms.matches.size() * 48);
  text += std::string(kMatchMagic) + " " + std::to_string(kMatchFormatVersion);
  text += " frame_id=" + std::to_string(ms.frame_id);
  text += " camera_a=" + std::to_string(ms.camera_a);
  text += " camera_b=" + std::to_string(ms.camera_b);
  text += " size_a=" + std::to_string(ms.size_a.width) + "x" + std::to_string(ms.size_a.height);
  text += " size_b=" + std::to_string(ms.size_b.width) + "x" + std::to_string(ms.size_b.height);
  text += '\n';
  for (const auto& m : ms.matches) {
    append_number(text, m.pt_a.x());
    text += ',';
    append_number(text, m.pt_a.y());
    text += ',';
    append_number(text, m.pt_b.x());
    text += ',';
    append_number(text, m.pt_b.y());
    text += ',';
    append_number(text, m.confidence);
    text += '\n';
  }
  out << text;
}

void write_matches(const std::filesystem::path& path, const MatchSet& ms) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  write_matches(out, ms);
}

MatchSet filter_by_confidence(const MatchSet& ms, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("confidence threshold must lie in [0, 1]");
  }
  MatchSet out = ms;
  out.matches.clear();
  for (const auto& m : ms.matches) {
    if (m.confidence >= threshold) {
      out.matches.push_back(m);
    }
  }
  return out;
}

GroupedMatches assign_to_detections(const MatchSet& ms, const std::vector<Detection>& dets_a,
                                    const std::vector<Detection>& dets_b) {
  GroupedMatches grouped;
  std::vector<std::size_t> in_a;
  std::vector<std::size_t> in_b;
  for (const auto& m : ms.matches) {
    in_a.clear();
    in_b.clear();
    for (std::size_t i = 0; i < dets_a.size(); ++i) {
      if (dets_a[i].bbox.contains(m.pt_a)) {
        in_a.push_back(i);
      }
    }
    if (in_a.empty()) {
      continue;
    }
    for (std::size_t j = 0; j < dets_b.size(); ++j) {
      if (dets_b[j].bbox.contains(m.pt_b)) {
        in_b.push_back(j);
      }
    }
    for (const auto i : in_a) {
      for (const auto j : in_b) {
        grouped[{i, j}].push_back(m);
      }
    }
  }
  return grouped;
}

}  // namespace mca
