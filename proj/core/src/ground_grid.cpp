#include "mca/ground_grid.hpp"

#include <stdexcept>

namespace mca {

std::vector<Vec3> generate_ground_grid(const GroundGrid& grid) {
  if (grid.rows == 0 || grid.cols == 0) {
    throw std::invalid_argument("ground grid must have at least one row and column");
  }
  if (!(grid.spacing > 0.0)) {
    throw std::invalid_argument("ground grid spacing must be positive");
  }
  const double z = grid.elevation();
  std::vector<Vec3> points;
  points.reserve(grid.size());
  for (std::size_t j = 0; j < grid.rows; ++j) {
    const double y = grid.origin.y() + grid.spacing * static_cast<double>(j);
    for (std::size_t i = 0; i < grid.cols; ++i) {
      points.emplace_back(grid.origin.x() + grid.spacing * static_cast<double>(i), y, z);
    }
  }
  return points;
}

}  // namespace mca
