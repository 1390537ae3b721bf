#pragma once

#include <compare>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace mca {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Image extent in pixels.
struct ImageSize {
  int width = 0;
  int height = 0;

  /// Half-open test: 0 <= x < width, 0 <= y < height.
  [[nodiscard]] bool contains_strict(const Vec2& p) const {
    return p.x() >= 0.0 && p.y() >= 0.0 && p.x() < width && p.y() < height;
  }

  [[nodiscard]] bool valid() const { return width > 0 && height > 0; }

  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

/// Ordered pair of camera ids, e.g. {1, 4}.
struct CameraPair {
  int a = 0;
  int b = 0;

  friend auto operator<=>(const CameraPair&, const CameraPair&) = default;
};

[[nodiscard]] std::string to_string(const CameraPair& pair);

// Error hierarchy. Everything thrown by the library for bad data derives from
// mca::Error; precondition violations use std::invalid_argument.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::size_t row)
      : Error(what + " (row " + std::to_string(row) + ")"), row_(row) {}

  [[nodiscard]] std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

class EstimationError : public Error {
 public:
  using Error::Error;
};

class NoOverlapError : public Error {
 public:
  using Error::Error;
};

class PointAtInfinityError : public Error {
 public:
  using Error::Error;
};

class MaskDegenerateError : public Error {
 public:
  using Error::Error;
};

}  // namespace mca
