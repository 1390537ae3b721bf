#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "mca/homography.hpp"
#include "mca/matches.hpp"

namespace mca {

struct RefactorParams {
  /// Gaussian scale in pixels; 0 disables refactoring.
  double distance_coefficient = 0.0;
  /// Average the a->b and b->a residuals instead of using a->b only.
  bool symmetric = false;
};

/// exp(-d^2 / (2 coeff^2)). Throws std::invalid_argument for coeff <= 0.
[[nodiscard]] double gaussian_confidence(double distance_px, double coeff);

/// Per-match record of how a confidence was rescaled.
struct RefactorDiagnostic {
  double distance = 0.0;  // +inf when pt_a maps to infinity
  double factor = 1.0;
  double old_confidence = 0.0;
  double new_confidence = 0.0;
};

/// Multiplies each match confidence by the Gaussian of its homography
/// residual. With coefficient 0 the input is returned unchanged. Matches
/// whose point maps to infinity get confidence 0.
[[nodiscard]] MatchSet refactor_matches(const MatchSet& ms, const Homography& h_ab,
                                        const RefactorParams& params);

[[nodiscard]] std::vector<RefactorDiagnostic> refactor_diagnostics(const MatchSet& ms,
                                                                   const Homography& h_ab,
                                                                   const RefactorParams& params);

/// Delimited dump: distance,factor,old_confidence,new_confidence.
void write_refactor_diagnostics(std::ostream& out, std::span<const RefactorDiagnostic> rows);

}  // namespace mca
