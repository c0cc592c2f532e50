#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace cdtw {

/// A one-dimensional polyline parametrised by arc length.
///
/// Consecutive duplicate values are collapsed on construction, so every
/// segment has positive length and `prefix_lengths()` is strictly increasing.
class Curve {
 public:
  explicit Curve(std::span<const double> values);
  Curve(std::initializer_list<double> values);

  const std::vector<double>& vertices() const { return vertices_; }
  const std::vector<double>& prefix_lengths() const { return prefix_; }
  std::size_t size() const { return vertices_.size(); }
  std::size_t segments() const { return vertices_.size() - 1; }
  double length() const { return prefix_.back(); }

  /// Value at arc length s. Throws OutOfDomain outside [0, length()].
  double point_at(double s) const;

  /// Index of the segment containing s (the left one at interior vertices).
  std::size_t segment_at(double s) const;

  /// +1 or -1: direction of segment k (0-based).
  int direction(std::size_t k) const { return vertices_[k + 1] > vertices_[k] ? 1 : -1; }

  Curve scaled(double factor) const;
  Curve translated(double shift) const;

 private:
  std::vector<double> vertices_;
  std::vector<double> prefix_;
};

Curve build_curve(std::span<const double> values);

/// h(x, y) = |P(x) - Q(y)|.
double height(const Curve& p, const Curve& q, double x, double y);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Segment {
  Point from;
  Point to;
};

/// One parameter-space cell, in global arc-length coordinates.
struct Cell {
  std::size_t i = 0;  // 1-based segment index on P
  std::size_t j = 0;  // 1-based segment index on Q
  double x_lo = 0, x_hi = 0;
  double y_lo = 0, y_hi = 0;
  int dir_p = 1;
  int dir_q = 1;
  /// Same direction: h = |x - y - offset|. Opposite: h = |x + y - offset|.
  double offset = 0.0;
  /// Zero-height slope-1 segment clipped to the cell; empty when the
  /// directions differ or the line misses the cell.
  std::optional<Segment> valley;
  /// Set when the valley line only touches a corner of the cell.
  bool valley_degenerate = false;

  bool same_direction() const { return dir_p == dir_q; }
  double width() const { return x_hi - x_lo; }
  double height() const { return y_hi - y_lo; }
};

Cell cell_info(const Curve& p, const Curve& q, std::size_t i, std::size_t j);

}  // namespace cdtw
