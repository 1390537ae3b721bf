#pragma once

#include <cstddef>
#include <vector>

#include "mca/types.hpp"

namespace mca {

/// Regular grid of world points on a horizontal plane. Defaults describe the
/// WILDTRACK ground grid raised by 40 cells (1.0 m).
struct GroundGrid {
  std::size_t rows = 1440;
  std::size_t cols = 480;
  double spacing = 0.025;          // meters per cell
  Vec2 origin{-3.0, -9.0};         // meters
  double z_units = 40.0;           // elevation, in cells

  [[nodiscard]] double elevation() const { return z_units * spacing; }
  [[nodiscard]] std::size_t size() const { return rows * cols; }
};

/// Points (origin.x + spacing*i, origin.y + spacing*j, elevation) for
/// i in [0, cols), j in [0, rows), with i varying fastest.
/// Throws std::invalid_argument for an empty grid or non-positive spacing.
[[nodiscard]] std::vector<Vec3> generate_ground_grid(const GroundGrid& grid);

}  // namespace mca
