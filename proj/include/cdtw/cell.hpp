#pragma once

// Per-cell propagation of boundary cost functions.
//
// Everything below works in a canonical frame: local X in [0, W] along the
// output edge, Y in [0, H] towards it, and h = |X - Y - c| (same direction)
// or |X + Y - c| (opposite directions). The top edge of a cell is solved in
// the plain frame, the right edge in the transposed one.

#include <cstddef>
#include <vector>

#include "cdtw/curve.hpp"
#include "cdtw/pwq.hpp"

namespace cdtw {

struct CellFrame {
  double W = 0.0;
  double H = 0.0;
  bool same = true;
  double c = 0.0;
  bool transposed = false;

  double height(double x, double y) const;
  /// Valley range along X, empty (lo >= hi) when there is no riding.
  double valley_lo() const;
  double valley_hi() const;
  bool has_valley(double eps = kDefaultEps) const;
};

CellFrame frame_of(const Cell& cell, bool transposed);

/// Tie-break ranks of the candidate families. Larger wins on equal cost.
struct FamilyRanks {
  int vertical = 1;
  int valley = 2;
  int bend = 3;
  int corner = 4;
  int valley_left = 1;
  int valley_bottom = 0;

  static FamilyRanks for_frame(bool transposed);
};

/// Counters filled while solving cells; none of them abort the solve.
struct FragmentStats {
  std::size_t fragments = 0;
  /// Largest number of fragment pieces produced from one source piece.
  std::size_t max_pieces_per_source = 0;
  /// Cumulative minima whose output exceeded input + distinct(a,b) + 1 pieces.
  std::size_t cummin_bound_violations = 0;

  void merge(const FragmentStats& other);
};

struct BaseCase {
  /// bottom[i]: bottom edge of cell (i+1, 1), local coordinate.
  std::vector<Pwq> bottom;
  /// left[j]: left edge of cell (1, j+1), local coordinate.
  std::vector<Pwq> left;
};

BaseCase base_case(const Curve& p, const Curve& q);

/// Bivariate cost of the left -> top bend path (0,s) -> (t,s) -> (t,H),
/// valid while the horizontal leg stays on one side of the valley.
struct PathCostSurface {
  double ss = 0, st = 0, tt = 0, s = 0, t = 0, k = 0;

  double operator()(double s_val, double t_val) const {
    return ss * s_val * s_val + st * s_val * t_val + tt * t_val * t_val + s * s_val + t * t_val + k;
  }
  /// Cost along s = alpha t + beta as a quadratic in t on [t0, t1].
  Quadratic along(double alpha, double beta, double t0, double t1) const;
};

PathCostSurface bend_surface(const CellFrame& frame, const Quadratic& left_piece);

/// F(X) = integral over Y in [0, H] of h(X, Y), on [0, W].
Pwq vertical_transport(const CellFrame& frame);
/// Running integral of h along the top edge, on [0, W].
Pwq top_transport(const CellFrame& frame);

/// Top-edge candidates of an opposite-direction cell: vertical transport
/// from the bottom and the top-left corner.
std::vector<Pwq> propagate_type_a(const CellFrame& frame, const Pwq& bottom, const Pwq& left,
                                  const FamilyRanks& ranks, FragmentStats* stats = nullptr);

/// Top-edge candidate through the valley (transport, cumulative minimum
/// along the valley, transport out). Throws WrongCellType without a valley.
Pwq propagate_type_b(const CellFrame& frame, const Pwq& bottom, const Pwq& left,
                     const FamilyRanks& ranks, double eps = kDefaultEps,
                     FragmentStats* stats = nullptr);

/// Top-edge candidates of a same-direction cell that avoid the valley:
/// vertical transport, corner, and one bend fragment per left piece.
std::vector<Pwq> propagate_type_c(const CellFrame& frame, const Pwq& bottom, const Pwq& left,
                                  const FamilyRanks& ranks, double eps = kDefaultEps,
                                  FragmentStats* stats = nullptr);

/// Envelope of all applicable candidates followed by the edge closure.
Pwq solve_output(const CellFrame& frame, const Pwq& bottom, const Pwq& left,
                 double eps = kDefaultEps, FragmentStats* stats = nullptr);

struct CellOutput {
  Pwq top;
  Pwq right;
  FragmentStats stats;
};

/// Inputs and outputs are in local edge coordinates: bottom/top over
/// [0, width], left/right over [0, height].
CellOutput solve_cell(const Cell& cell, const Pwq& bottom, const Pwq& left,
                      double eps = kDefaultEps);

}  // namespace cdtw
