#include "cdtw/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "cdtw/cell.hpp"
#include "cdtw/error.hpp"

namespace cdtw {

namespace {

std::string cell_name(std::size_t i, std::size_t j) {
  return "cell (" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

// Integral of |l0 + (l1 - l0) u| over u in [0, 1].
double abs_linear_mean(double l0, double l1) {
  if ((l0 >= 0.0) == (l1 >= 0.0) || l0 == 0.0 || l1 == 0.0) return 0.5 * std::abs(l0 + l1);
  return 0.5 * (l0 * l0 + l1 * l1) / std::abs(l0 - l1);
}

void add_crossings(const std::vector<double>& breaks, double from, double to,
                   std::vector<double>& taus) {
  if (from == to) return;
  const double lo = std::min(from, to), hi = std::max(from, to);
  auto it = std::upper_bound(breaks.begin(), breaks.end(), lo);
  for (; it != breaks.end() && *it < hi; ++it) taus.push_back((*it - from) / (to - from));
}

// Where a backtracking step continues.
struct Cursor {
  enum class Edge { Top, Right } edge = Edge::Top;
  std::size_t i = 0, j = 0;  // 0-based cell owning the output edge
  double param = 0.0;        // local coordinate along that edge
};

}  // namespace

const char* to_string(LegKind kind) {
  switch (kind) {
    case LegKind::AxisParallel: return "axis";
    case LegKind::ValleyRide: return "valley";
    case LegKind::Diagonal: return "diagonal";
  }
  return "?";
}

CdtwRun solve_all(const Curve& p, const Curve& q, const CdtwConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  CdtwRun run;
  EdgeTable& t = run.edges;
  t.n = p.segments();
  t.m = q.segments();
  t.hor.assign(t.m + 1, std::vector<Pwq>(t.n));
  t.ver.assign(t.n + 1, std::vector<Pwq>(t.m));

  BaseCase base = base_case(p, q);
  for (std::size_t i = 0; i < t.n; ++i) t.hor[0][i] = std::move(base.bottom[i]);
  for (std::size_t j = 0; j < t.m; ++j) t.ver[0][j] = std::move(base.left[j]);

  FragmentStats frag;
  for (std::size_t level = 0; level + 1 < t.n + t.m; ++level) {
    const std::size_t i_lo = level >= t.m ? level - t.m + 1 : 0;
    const std::size_t i_hi = std::min(level, t.n - 1);
    for (std::size_t i = i_lo; i <= i_hi; ++i) {
      const std::size_t j = level - i;
      const Cell cell = cell_info(p, q, i + 1, j + 1);
      try {
        CellOutput out = solve_cell(cell, t.hor[j][i], t.ver[i][j], config.eps);
        out.top.validate(1e-6);
        out.right.validate(1e-6);
        t.hor[j + 1][i] = std::move(out.top);
        t.ver[i + 1][j] = std::move(out.right);
        frag.merge(out.stats);
      } catch (const Error& e) {
        throw Error(e.code(), cell_name(i + 1, j + 1) + ": " + e.detail());
      }
      ++run.stats.cells_solved;
    }
  }

  const Pwq& top = t.hor[t.m][t.n - 1];
  const Pwq& right = t.ver[t.n][t.m - 1];
  const double via_top = top(top.hi());
  const double via_right = right(right.hi());
  if (std::abs(via_top - via_right) > 1e-6 * (1.0 + std::abs(via_top))) {
    throw Error(ErrorCode::InvariantViolation,
                "final corner disagrees: top " + std::to_string(via_top) + ", right " +
                    std::to_string(via_right));
  }
  run.ends_on_top = via_top <= via_right;
  run.value = std::max(0.0, std::min(via_top, via_right));

  run.stats.fragments = frag.fragments;
  run.stats.max_pieces_per_source = frag.max_pieces_per_source;
  run.stats.cummin_bound_violations = frag.cummin_bound_violations;
  if (config.collect_stats) collect_stats(t, p.size(), q.size(), run.stats);
  run.stats.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

CdtwResult cdtw_exact(const Curve& p, const Curve& q, const CdtwConfig& config) {
  // The tolerances are tuned for values of order one. Rescale by a power of two
  // so that the span is in [1, 2); that is exact and is undone exactly below.
  double lo = p.vertices().front(), hi = lo;
  for (const Curve* c : {&p, &q}) {
    for (double v : c->vertices()) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const int e = hi > lo ? std::ilogb(hi - lo) : 0;
  const Curve ps = p.scaled(std::ldexp(1.0, -e));
  const Curve qs = q.scaled(std::ldexp(1.0, -e));

  CdtwRun run = solve_all(ps, qs, config);
  CdtwResult result;
  result.value = std::ldexp(run.value, 2 * e);
  if (config.record_path) {
    WarpPath path = reconstruct_path(ps, qs, run);
    for (auto& pt : path.points) {
      pt.x = std::ldexp(pt.x, e);
      pt.y = std::ldexp(pt.y, e);
    }
    result.path = std::move(path);
  }
  result.stats = std::move(run.stats);
  return result;
}

void collect_stats(const EdgeTable& edges, std::size_t p_vertices, std::size_t q_vertices,
                   SolveStats& stats) {
  stats.total_pieces = 0;
  stats.pieces_per_level.clear();
  stats.max_distinct_ab_per_level.clear();
  stats.max_distinct_ab_per_edge = 0;
  auto account = [&](const Pwq& f, std::size_t level) {
    if (f.empty()) return;
    stats.total_pieces += f.size();
    stats.pieces_per_level[level] += f.size();
    const std::size_t d = distinct_ab(f);
    auto& slot = stats.max_distinct_ab_per_level[level];
    slot = std::max(slot, d);
    stats.max_distinct_ab_per_edge = std::max(stats.max_distinct_ab_per_edge, d);
  };
  for (std::size_t r = 0; r < edges.hor.size(); ++r)
    for (std::size_t i = 0; i < edges.hor[r].size(); ++i) account(edges.hor[r][i], i + r + 2);
  for (std::size_t c = 0; c < edges.ver.size(); ++c)
    for (std::size_t j = 0; j < edges.ver[c].size(); ++j) account(edges.ver[c][j], c + j + 2);

  stats.bound_flags.clear();
  for (const auto& [k, count] : stats.pieces_per_level) {
    const double bound = 2.0 * std::pow(static_cast<double>(k), 4);
    if (static_cast<double>(count) > bound) {
      stats.bound_flags.push_back("level " + std::to_string(k) + " has " + std::to_string(count) +
                                  " pieces, bound 2k^4");
    }
  }
  const double total_bound = 2.0 * std::pow(static_cast<double>(p_vertices + q_vertices), 5);
  if (static_cast<double>(stats.total_pieces) > total_bound) {
    stats.bound_flags.push_back("total pieces " + std::to_string(stats.total_pieces) +
                                " exceed 2(n+m)^5");
  }
  if (stats.max_pieces_per_source > kMaxPiecesPerSource) {
    stats.bound_flags.push_back("a fragment produced " + std::to_string(stats.max_pieces_per_source) +
                                " pieces from one source piece");
  }
  if (stats.cummin_bound_violations > 0) {
    stats.bound_flags.push_back(std::to_string(stats.cummin_bound_violations) +
                                " cumulative minima exceeded their piece bound");
  }
}

WarpPath reconstruct_path(const Curve& p, const Curve& q, const CdtwRun& run) {
  const EdgeTable& t = run.edges;
  std::vector<Point> back;  // collected from the end towards the origin
  Cursor cur;
  cur.i = t.n - 1;
  cur.j = t.m - 1;
  if (run.ends_on_top) {
    cur.edge = Cursor::Edge::Top;
    cur.param = p.length() - p.prefix_lengths()[t.n - 1];
  } else {
    cur.edge = Cursor::Edge::Right;
    cur.param = q.length() - q.prefix_lengths()[t.m - 1];
  }

  const std::size_t max_steps = 4 * (t.n + t.m) + 8;
  for (std::size_t step = 0;; ++step) {
    if (step > max_steps) throw Error(ErrorCode::ProvenanceMissing, "backtracking does not terminate");
    const Cell cell = cell_info(p, q, cur.i + 1, cur.j + 1);
    const bool transposed = cur.edge == Cursor::Edge::Right;
    const CellFrame f = frame_of(cell, transposed);
    const Pwq& edge = transposed ? t.ver[cur.i + 1][cur.j] : t.hor[cur.j + 1][cur.i];
    const Provenance prov = edge.pieces()[edge.piece_index(cur.param)].prov;

    auto to_global = [&](double X, double Y) {
      return transposed ? Point{cell.x_lo + Y, cell.y_lo + X} : Point{cell.x_lo + X, cell.y_lo + Y};
    };

    double t_pos = std::clamp(cur.param, 0.0, f.W);
    back.push_back(to_global(t_pos, f.H));
    if (!std::isnan(prov.hold_edge)) {
      t_pos = std::clamp(prov.hold_edge, 0.0, f.W);
      back.push_back(to_global(t_pos, f.H));
    }
    // Predecessor in the frame: side 0 = frame bottom at X, side 1 = frame left at Y.
    int pred_side = 0;
    double pred = 0.0;
    switch (prov.kind) {
      case PathKind::Vertical:
        pred_side = 0;
        pred = t_pos;
        break;
      case PathKind::Corner:
        pred_side = 1;
        pred = f.H;
        break;
      case PathKind::Bend: {
        const double s = std::clamp(prov.turn_slope * t_pos + prov.turn_shift, 0.0, f.H);
        back.push_back(to_global(t_pos, s));
        pred_side = 1;
        pred = s;
        break;
      }
      case PathKind::Valley: {
        const double v = t_pos;
        const double entry = std::isnan(prov.hold_valley) ? v : prov.hold_valley;
        back.push_back(to_global(v, std::clamp(v - f.c, 0.0, f.H)));
        back.push_back(to_global(entry, std::clamp(entry - f.c, 0.0, f.H)));
        pred_side = prov.side;
        pred = prov.side == 0 ? entry : std::clamp(entry - f.c, 0.0, f.H);
        break;
      }
      default:
        throw Error(ErrorCode::ProvenanceMissing,
                    cell_name(cur.i + 1, cur.j + 1) + ": piece without path record");
    }
    const Point at = pred_side == 0 ? to_global(pred, 0.0) : to_global(0.0, pred);
    back.push_back(at);

    // Frame bottom is the real bottom unless transposed.
    const bool real_bottom = (pred_side == 0) != transposed;
    if (real_bottom) {
      if (cur.j == 0) {
        back.push_back({0.0, 0.0});
        break;
      }
      cur = Cursor{Cursor::Edge::Top, cur.i, cur.j - 1, at.x - cell.x_lo};
    } else {
      if (cur.i == 0) {
        back.push_back({0.0, 0.0});
        break;
      }
      cur = Cursor{Cursor::Edge::Right, cur.i - 1, cur.j, at.y - cell.y_lo};
    }
  }

  WarpPath path;
  std::reverse(back.begin(), back.end());
  const double tol = 1e-12 * (1.0 + p.length() + q.length());
  for (Point pt : back) {
    if (!path.points.empty()) {
      const Point& prev = path.points.back();
      pt.x = std::max(pt.x, prev.x);
      pt.y = std::max(pt.y, prev.y);
      if (pt.x - prev.x <= tol && pt.y - prev.y <= tol) continue;
    }
    path.points.push_back(pt);
  }
  if (path.points.empty() || path.points.front().x != 0.0 || path.points.front().y != 0.0) {
    path.points.insert(path.points.begin(), Point{0.0, 0.0});
  }
  path.points.back() = {p.length(), q.length()};
  if (path.points.size() == 1) path.points.push_back({p.length(), q.length()});

  for (std::size_t k = 0; k + 1 < path.points.size(); ++k) {
    const Point a = path.points[k], b = path.points[k + 1];
    const double dx = b.x - a.x, dy = b.y - a.y;
    LegKind kind = LegKind::Diagonal;
    if (dx <= tol || dy <= tol) {
      kind = LegKind::AxisParallel;
    } else if (segment_integral(p, q, a, b) <= 1e-12 * (1.0 + dx + dy)) {
      kind = LegKind::ValleyRide;
    }
    path.legs.push_back(kind);
  }
  return path;
}

double segment_integral(const Curve& p, const Curve& q, Point a, Point b) {
  const double l1 = std::abs(b.x - a.x) + std::abs(b.y - a.y);
  if (l1 == 0.0) return 0.0;
  std::vector<double> taus{0.0, 1.0};
  add_crossings(p.prefix_lengths(), a.x, b.x, taus);
  add_crossings(q.prefix_lengths(), a.y, b.y, taus);
  std::sort(taus.begin(), taus.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < taus.size(); ++k) {
    const double t0 = taus[k], t1 = taus[k + 1];
    if (!(t1 > t0)) continue;
    auto diff = [&](double tau) {
      const double x = std::clamp(a.x + (b.x - a.x) * tau, 0.0, p.length());
      const double y = std::clamp(a.y + (b.y - a.y) * tau, 0.0, q.length());
      return p.point_at(x) - q.point_at(y);
    };
    // Both curves are continuous and linear inside a sub-piece.
    total += (t1 - t0) * abs_linear_mean(diff(t0), diff(t1));
  }
  return total * l1;
}

double path_integral(const Curve& p, const Curve& q, const WarpPath& path) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < path.points.size(); ++k)
    total += segment_integral(p, q, path.points[k], path.points[k + 1]);
  return total;
}

}  // namespace cdtw
