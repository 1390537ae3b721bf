#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "mca/affinity.hpp"

namespace mca {

/// Minimum-cost assignment (Hungarian method with potentials, O(n^3)).
/// Returns min(m, n) (row, col) pairs sorted by row. Rectangular inputs are
/// padded to square with 1 + max entry; padded pairs are discarded. Ties are
/// broken by scan order. An empty matrix yields an empty result; a non-finite
/// entry throws std::invalid_argument.
[[nodiscard]] std::vector<std::pair<std::size_t, std::size_t>> hungarian(
    const Eigen::MatrixXd& cost);

/// Sum of cost over the given pairs.
[[nodiscard]] double assignment_cost(const Eigen::MatrixXd& cost,
                                     const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

struct AssociatedPair {
  std::size_t index_a = 0;
  std::size_t index_b = 0;
  double affinity = 0.0;

  friend bool operator==(const AssociatedPair&, const AssociatedPair&) = default;
};

struct Association {
  int frame_id = 0;
  std::vector<AssociatedPair> pairs;
  std::vector<std::size_t> unmatched_a;
  std::vector<std::size_t> unmatched_b;
};

/// Hungarian on 1 - A; pairs with affinity <= accept_threshold are dropped
/// and their indices reported unmatched.
[[nodiscard]] Association associate(const AffinityMatrix& A, double accept_threshold = 0.0);

/// Delimited rows frame_id,det_a,det_b,person_a,person_b,affinity. Detection
/// ids are indices into the per-camera detection lists.
void write_associations(std::ostream& out, const Association& assoc, const AffinityMatrix& A,
                        bool header = true);

/// Parses the write_associations format back into per-frame pairs (the
/// unmatched lists are left empty). Throws ValidationError with the 1-based
/// line number of a malformed row.
[[nodiscard]] std::map<int, Association> parse_associations(std::string_view text);

}  // namespace mca
