#include "cdtw/curve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cdtw/error.hpp"

namespace cdtw {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InsufficientVertices: return "InsufficientVertices";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::CoverageGap: return "CoverageGap";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::WrongCellType: return "WrongCellType";
    case ErrorCode::ProvenanceMissing: return "ProvenanceMissing";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ResolutionZero: return "ResolutionZero";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Curve::Curve(std::span<const double> values) {
  if (values.empty()) {
    throw Error(ErrorCode::InsufficientVertices, "empty value list");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InsufficientVertices, "non-finite value");
    if (vertices_.empty() || vertices_.back() != v) vertices_.push_back(v);
  }
  if (vertices_.size() < 2) {
    throw Error(ErrorCode::InsufficientVertices,
                "need at least 2 distinct consecutive values, got " + std::to_string(vertices_.size()));
  }
  prefix_.resize(vertices_.size());
  prefix_[0] = 0.0;
  for (std::size_t k = 1; k < vertices_.size(); ++k) {
    prefix_[k] = prefix_[k - 1] + std::abs(vertices_[k] - vertices_[k - 1]);
  }
}

Curve::Curve(std::initializer_list<double> values)
    : Curve(std::span<const double>(values.begin(), values.size())) {}

std::size_t Curve::segment_at(double s) const {
  auto it = std::lower_bound(prefix_.begin(), prefix_.end(), s);
  std::size_t k = it == prefix_.begin() ? 0 : static_cast<std::size_t>(it - prefix_.begin()) - 1;
  return std::min(k, segments() - 1);
}

double Curve::point_at(double s) const {
  const double slack = 1e-12 * (1.0 + length());
  if (!(s >= -slack && s <= length() + slack)) {
    throw Error(ErrorCode::OutOfDomain, "arc length " + std::to_string(s) + " outside [0, " +
                                            std::to_string(length()) + "]");
  }
  s = std::clamp(s, 0.0, length());
  const std::size_t k = segment_at(s);
  return vertices_[k] + direction(k) * (s - prefix_[k]);
}

Curve Curve::scaled(double factor) const {
  std::vector<double> v(vertices_);
  for (double& x : v) x *= factor;
  return Curve(v);
}

Curve Curve::translated(double shift) const {
  std::vector<double> v(vertices_);
  for (double& x : v) x += shift;
  return Curve(v);
}

Curve build_curve(std::span<const double> values) { return Curve(values); }

double height(const Curve& p, const Curve& q, double x, double y) {
  return std::abs(p.point_at(x) - q.point_at(y));
}

Cell cell_info(const Curve& p, const Curve& q, std::size_t i, std::size_t j) {
  if (i < 1 || i > p.segments() || j < 1 || j > q.segments()) {
    throw Error(ErrorCode::IndexOutOfRange,
                "cell (" + std::to_string(i) + "," + std::to_string(j) + ") outside " +
                    std::to_string(p.segments()) + "x" + std::to_string(q.segments()));
  }
  Cell cell;
  cell.i = i;
  cell.j = j;
  cell.x_lo = p.prefix_lengths()[i - 1];
  cell.x_hi = p.prefix_lengths()[i];
  cell.y_lo = q.prefix_lengths()[j - 1];
  cell.y_hi = q.prefix_lengths()[j];
  cell.dir_p = p.direction(i - 1);
  cell.dir_q = q.direction(j - 1);

  // Signed difference at the lower-left corner.
  const double d00 = p.vertices()[i - 1] - q.vertices()[j - 1];
  if (cell.same_direction()) {
    cell.offset = -cell.dir_p * d00 + (cell.x_lo - cell.y_lo);
    const double lo = std::max(cell.x_lo, cell.y_lo + cell.offset);
    const double hi = std::min(cell.x_hi, cell.y_hi + cell.offset);
    const double slack = 1e-12 * (1.0 + std::abs(cell.x_hi) + std::abs(cell.y_hi));
    if (hi > lo + slack) {
      cell.valley = Segment{{lo, lo - cell.offset}, {hi, hi - cell.offset}};
    } else if (hi >= lo - slack) {
      cell.valley_degenerate = true;
    }
  } else {
    cell.offset = -cell.dir_p * d00 + (cell.x_lo + cell.y_lo);
  }
  return cell;
}

}  // namespace cdtw
