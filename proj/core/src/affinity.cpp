#include "mca/affinity.hpp"

#include <ostream>
#include <stdexcept>

namespace mca {

std::string_view to_string(AffinityMetric metric) {
  return metric == AffinityMetric::M4 ? "M4" : "M5";
}

AffinityMetric parse_metric(std::string_view text) {
  if (text == "M4" || text == "m4") {
    return AffinityMetric::M4;
  }
  if (text == "M5" || text == "m5") {
    return AffinityMetric::M5;
  }
  throw std::invalid_argument("unknown association metric '" + std::string(text) + "'");
}

double affinity_m4(std::span<const double> confidences) {
  double miss = 1.0;
  for (const double c : confidences) {
    if (!(c >= 0.0 && c <= 1.0)) {
      throw std::invalid_argument("confidence outside [0, 1]");
    }
    miss *= 1.0 - c;
  }
  return 1.0 - miss;
}

double affinity_m4(std::span<const KeypointMatch> matches) {
  double miss = 1.0;
  for (const auto& m : matches) {
    if (!(m.confidence >= 0.0 && m.confidence <= 1.0)) {
      throw std::invalid_argument("confidence outside [0, 1]");
    }
    miss *= 1.0 - m.confidence;
  }
  return 1.0 - miss;
}

double affinity_m5(std::span<const FrameAffinity> per_frame) {
  if (per_frame.empty()) {
    throw std::invalid_argument("multi-frame affinity needs at least one frame");
  }
  double sum = 0.0;
  for (const auto& f : per_frame) {
    sum += f.value;
  }
  return sum / static_cast<double>(per_frame.size());
}

AffinityMatrix build_affinity_m4(int frame_id, const std::vector<Detection>& dets_a,
                                 const std::vector<Detection>& dets_b,
                                 const GroupedMatches& grouped) {
  AffinityMatrix A;
  A.frame_id = frame_id;
  A.metric = AffinityMetric::M4;
  A.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dets_a.size()),
                                   static_cast<Eigen::Index>(dets_b.size()));
  for (const auto& d : dets_a) {
    A.row_person_ids.push_back(d.person_id);
  }
  for (const auto& d : dets_b) {
    A.col_person_ids.push_back(d.person_id);
  }
  for (const auto& [key, matches] : grouped) {
    const auto [i, j] = key;
    if (i >= dets_a.size() || j >= dets_b.size()) {
      throw std::out_of_range("grouped match index outside the detection lists");
    }
    A.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = affinity_m4(matches);
  }
  return A;
}

AffinityBuilder::AffinityBuilder(AffinityMetric metric, int window)
    : metric_(metric), window_(window) {
  if (window < 1) {
    throw std::invalid_argument("affinity window must be at least 1");
  }
}

AffinityMatrix AffinityBuilder::build(int frame_id, const std::vector<Detection>& dets_a,
                                      const std::vector<Detection>& dets_b,
                                      const GroupedMatches& grouped) {
  AffinityMatrix A = build_affinity_m4(frame_id, dets_a, dets_b, grouped);
  if (metric_ == AffinityMetric::M4) {
    return A;
  }
  if (!frames_.empty() && frame_id <= frames_.back().frame_id) {
    throw std::invalid_argument("frames must be supplied in increasing order");
  }

  FrameEntry entry;
  entry.frame_id = frame_id;
  for (Eigen::Index i = 0; i < A.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.values.cols(); ++j) {
      entry.m4[{A.row_person_ids[static_cast<std::size_t>(i)],
                A.col_person_ids[static_cast<std::size_t>(j)]}] = A.values(i, j);
    }
  }
  frames_.push_back(std::move(entry));
  while (frames_.size() > static_cast<std::size_t>(window_)) {
    frames_.pop_front();
  }

  A.metric = AffinityMetric::M5;
  for (Eigen::Index i = 0; i < A.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.values.cols(); ++j) {
      const auto window = history(A.row_person_ids[static_cast<std::size_t>(i)],
                                  A.col_person_ids[static_cast<std::size_t>(j)]);
      A.values(i, j) = affinity_m5(window);
    }
  }
  return A;
}

std::vector<FrameAffinity> AffinityBuilder::history(int person_a, int person_b) const {
  std::vector<FrameAffinity> out;
  for (const auto& f : frames_) {
    const auto it = f.m4.find({person_a, person_b});
    if (it != f.m4.end()) {
      out.push_back({f.frame_id, it->second});
    }
  }
  return out;
}

void write_affinity(std::ostream& out, const AffinityMatrix& A, bool header) {
  if (header) {
    out << "frame_id,row,col,person_a,person_b,affinity\n";
  }
  const auto precision = out.precision(17);
  for (Eigen::Index i = 0; i < A.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.values.cols(); ++j) {
      out << A.frame_id << ',' << i << ',' << j << ','
          << A.row_person_ids[static_cast<std::size_t>(i)] << ','
          << A.col_person_ids[static_cast<std::size_t>(j)] << ',' << A.values(i, j) << '\n';
    }
  }
  out.precision(precision);
}

}  // namespace mca
