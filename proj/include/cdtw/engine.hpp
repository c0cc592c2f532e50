#pragma once

// Dynamic program over all cells, final value, path reconstruction and
// piece-count statistics.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cdtw/curve.hpp"
#include "cdtw/pwq.hpp"

namespace cdtw {

struct CdtwConfig {
  double eps = kDefaultEps;
  bool record_path = true;
  bool collect_stats = true;
};

struct SolveStats {
  std::size_t total_pieces = 0;
  /// Level k = i + j of the cell owning the edge (1-based segment indices).
  std::map<std::size_t, std::size_t> pieces_per_level;
  std::map<std::size_t, std::size_t> max_distinct_ab_per_level;
  std::size_t max_distinct_ab_per_edge = 0;
  double wall_time = 0.0;
  std::size_t cells_solved = 0;
  std::size_t fragments = 0;
  std::size_t max_pieces_per_source = 0;
  std::size_t cummin_bound_violations = 0;
  /// Human-readable descriptions of exceeded bounds; empty when all hold.
  std::vector<std::string> bound_flags;

  bool bounds_ok() const { return bound_flags.empty(); }
};

/// Fragments from one source piece may not exceed this many pieces.
inline constexpr std::size_t kMaxPiecesPerSource = 6;

enum class LegKind { AxisParallel, ValleyRide, Diagonal };

const char* to_string(LegKind kind);

struct WarpPath {
  std::vector<Point> points;
  /// legs[k] joins points[k] and points[k + 1].
  std::vector<LegKind> legs;
};

struct CdtwResult {
  double value = 0.0;
  SolveStats stats;
  std::optional<WarpPath> path;
};

/// Boundary cost functions in local edge coordinates.
/// hor[r][i]: horizontal edge at grid row r (0..m) under/over column i (0..n-1).
/// ver[c][j]: vertical edge at grid column c (0..n) beside row j (0..m-1).
struct EdgeTable {
  std::size_t n = 0;  // segments of P
  std::size_t m = 0;  // segments of Q
  std::vector<std::vector<Pwq>> hor;
  std::vector<std::vector<Pwq>> ver;
};

struct CdtwRun {
  EdgeTable edges;
  double value = 0.0;
  /// True when the final corner is read from the top edge of the last cell.
  bool ends_on_top = true;
  SolveStats stats;
};

/// Runs the base case and every cell in anti-diagonal order.
CdtwRun solve_all(const Curve& p, const Curve& q, const CdtwConfig& config = {});

CdtwResult cdtw_exact(const Curve& p, const Curve& q, const CdtwConfig& config = {});

/// Backtracks piece provenance from the final corner. Throws ProvenanceMissing.
WarpPath reconstruct_path(const Curve& p, const Curve& q, const CdtwRun& run);

/// Piece counts per level and distinct coefficient pairs, plus bound checks
/// in terms of vertex counts.
void collect_stats(const EdgeTable& edges, std::size_t p_vertices, std::size_t q_vertices,
                   SolveStats& stats);

/// Exact line integral of h along the path with the L1 length element.
double path_integral(const Curve& p, const Curve& q, const WarpPath& path);

/// Exact integral of h along one straight segment, L1 length element.
double segment_integral(const Curve& p, const Curve& q, Point a, Point b);

}  // namespace cdtw
