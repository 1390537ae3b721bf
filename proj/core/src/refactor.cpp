#include "mca/refactor.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace mca {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double residual(const Mat3& H, const Vec2& from, const Vec2& to) {
  const Vec3 q = H * from.homogeneous();
  if (std::abs(q.z()) < 1e-12) {
    return kInf;
  }
  return (q.hnormalized() - to).norm();
}

RefactorDiagnostic diagnose(const KeypointMatch& m, const Mat3& H, const Mat3& H_inv,
                            const RefactorParams& params) {
  RefactorDiagnostic d;
  d.old_confidence = m.confidence;
  d.distance = residual(H, m.pt_a, m.pt_b);
  if (params.symmetric) {
    d.distance = 0.5 * (d.distance + residual(H_inv, m.pt_b, m.pt_a));
  }
  d.factor = std::isfinite(d.distance) ? gaussian_confidence(d.distance, params.distance_coefficient)
                                       : 0.0;
  d.new_confidence = m.confidence * d.factor;
  return d;
}

}  // namespace

double gaussian_confidence(double distance_px, double coeff) {
  if (!(coeff > 0.0)) {
    throw std::invalid_argument("gaussian coefficient must be positive; use 0 to skip refactoring");
  }
  return std::exp(-(distance_px * distance_px) / (2.0 * coeff * coeff));
}

std::vector<RefactorDiagnostic> refactor_diagnostics(const MatchSet& ms, const Homography& h_ab,
                                                     const RefactorParams& params) {
  std::vector<RefactorDiagnostic> rows;
  rows.reserve(ms.matches.size());
  if (params.distance_coefficient == 0.0) {
    for (const auto& m : ms.matches) {
      rows.push_back({0.0, 1.0, m.confidence, m.confidence});
    }
    return rows;
  }
  if (params.distance_coefficient < 0.0) {
    throw std::invalid_argument("distance coefficient must be non-negative");
  }
  const Mat3 H_inv = params.symmetric ? Mat3(h_ab.H.inverse()) : Mat3::Identity();
  for (const auto& m : ms.matches) {
    rows.push_back(diagnose(m, h_ab.H, H_inv, params));
  }
  return rows;
}

MatchSet refactor_matches(const MatchSet& ms, const Homography& h_ab,
                          const RefactorParams& params) {
  if (params.distance_coefficient == 0.0) {
    return ms;
  }
  const auto rows = refactor_diagnostics(ms, h_ab, params);
  MatchSet out = ms;
  for (std::size_t i = 0; i < out.matches.size(); ++i) {
    out.matches[i].confidence = rows[i].new_confidence;
  }
  return out;
}

void write_refactor_diagnostics(std::ostream& out, std::span<const RefactorDiagnostic> rows) {
  out << "distance,factor,old_confidence,new_confidence\n";
  const auto precision = out.precision(17);
  for (const auto& r : rows) {
    out << r.distance << ',' << r.factor << ',' << r.old_confidence << ',' << r.new_confidence
        << '\n';
  }
  out.precision(precision);
}

}  // namespace mca
