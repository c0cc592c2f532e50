#include "cdtw/cell.hpp"

#include <algorithm>
#include <cmath>

#include "cdtw/error.hpp"

namespace cdtw {

namespace {

// Antiderivative of |w|: integral over [a, b] of |w| dw = F(b) - F(a).
double abs_antiderivative(double w) { return 0.5 * w * std::abs(w); }

Provenance family(PathKind kind, int rank, int side = 0) {
  Provenance p;
  p.kind = kind;
  p.rank = rank;
  p.side = side;
  return p;
}

void note_pieces(FragmentStats* stats, std::size_t source_pieces, std::size_t fragment_pieces) {
  if (!stats) return;
  ++stats->fragments;
  // New breakpoints can all land in one source piece, so this is the worst case.
  const std::size_t per_source =
      fragment_pieces >= source_pieces ? fragment_pieces - source_pieces + 1 : 1;
  stats->max_pieces_per_source = std::max(stats->max_pieces_per_source, per_source);
}

void note_cummin(FragmentStats* stats, const Pwq& in, const Pwq& out) {
  if (stats && out.size() > in.size() + distinct_ab(in) + 1) ++stats->cummin_bound_violations;
}

Pwq vertical_fragment(const CellFrame& frame, const Pwq& bottom, const FamilyRanks& ranks,
                      FragmentStats* stats) {
  Pwq frag = with_provenance(add(bottom, vertical_transport(frame)),
                             family(PathKind::Vertical, ranks.vertical));
  note_pieces(stats, bottom.size(), frag.size());
  return frag;
}

Pwq corner_fragment(const CellFrame& frame, const Pwq& left, const FamilyRanks& ranks,
                    FragmentStats* stats) {
  Pwq frag = with_provenance(add_constant(top_transport(frame), left(frame.H)),
                             family(PathKind::Corner, ranks.corner));
  note_pieces(stats, 1, frag.size());
  return frag;
}

// Bend paths from one left piece, as a fragment over [0, min(W, sb + c)].
Pwq bend_fragment(const CellFrame& frame, const Quadratic& piece, const FamilyRanks& ranks) {
  const double sa = piece.lo, sb = piece.hi, c = frame.c;
  const double tmax = std::min(frame.W, sb + c);
  if (!(sb > sa) || !(tmax > 0.0)) return {};
  const PathCostSurface surf = bend_surface(frame, piece);

  auto emit = [&](std::vector<Quadratic>& out, double alpha, double beta, double t0, double t1) {
    if (!(t1 > t0)) return;
    Quadratic q = surf.along(alpha, beta, t0, t1);
    q.prov = family(PathKind::Bend, ranks.bend, 1);
    q.prov.turn_slope = alpha;
    q.prov.turn_shift = beta;
    out.push_back(q);
  };

  std::vector<Quadratic> out;
  const double knee = std::clamp(sa + c, 0.0, tmax);
  if (surf.ss > 1e-12) {
    // Convex in s: s(t) is the stationary point clamped to the feasible range.
    const double as = -surf.st / (2.0 * surf.ss);
    const double bs = -surf.s / (2.0 * surf.ss);
    std::vector<double> cuts{0.0, tmax, knee};
    if (as != 0.0) {
      cuts.push_back((sa - bs) / as);
      cuts.push_back((sb - bs) / as);
    }
    if (std::abs(1.0 - as) > 1e-15) cuts.push_back((bs + c) / (1.0 - as));
    std::erase_if(cuts, [&](double x) { return !(x >= 0.0 && x <= tmax); });
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double t0 = cuts[k], t1 = cuts[k + 1];
      const double tm = 0.5 * (t0 + t1);
      const double low = std::max(sa, tm - c);
      const double star = as * tm + bs;
      if (star < low) {
        if (sa >= tm - c) {
          emit(out, 0.0, sa, t0, t1);
        } else {
          emit(out, 1.0, -c, t0, t1);
        }
      } else if (star > sb) {
        emit(out, 0.0, sb, t0, t1);
      } else {
        emit(out, as, bs, t0, t1);
      }
    }
  } else {
    // Concave or linear in s: the optimum sits at one end of the feasible range.
    // Both ends are emitted; the envelope picks the better one.
    std::vector<Quadratic> far_end;
    emit(far_end, 0.0, sb, 0.0, tmax);
    emit(out, 0.0, sa, 0.0, knee);
    emit(out, 1.0, -c, knee, tmax);
    Pwq low = normalize(Pwq(std::move(out)));
    Pwq high = normalize(Pwq(std::move(far_end)));
    const Pwq both[] = {low, high};
    return lower_envelope_ordered(both, 0.0, tmax);
  }
  return normalize(Pwq(std::move(out)));
}

}  // namespace

double CellFrame::height(double x, double y) const {
  return same ? std::abs(x - y - c) : std::abs(x + y - c);
}

double CellFrame::valley_lo() const { return same ? std::max(0.0, c) : 0.0; }
double CellFrame::valley_hi() const { return same ? std::min(W, H + c) : 0.0; }

bool CellFrame::has_valley(double eps) const {
  return same && valley_hi() - valley_lo() > eps * (1.0 + W + H);
}

CellFrame frame_of(const Cell& cell, bool transposed) {
  CellFrame f;
  f.same = cell.same_direction();
  f.c = f.same ? cell.offset - (cell.x_lo - cell.y_lo) : cell.offset - (cell.x_lo + cell.y_lo);
  f.W = cell.width();
  f.H = cell.height();
  f.transposed = transposed;
  if (transposed) {
    std::swap(f.W, f.H);
    if (f.same) f.c = -f.c;
  }
  return f;
}

FamilyRanks FamilyRanks::for_frame(bool transposed) {
  FamilyRanks r;
  if (transposed) {
    r.vertical = 5 - r.vertical;
    r.valley = 5 - r.valley;
    r.bend = 5 - r.bend;
    r.corner = 5 - r.corner;
    std::swap(r.valley_left, r.valley_bottom);
  }
  return r;
}

void FragmentStats::merge(const FragmentStats& other) {
  fragments += other.fragments;
  max_pieces_per_source = std::max(max_pieces_per_source, other.max_pieces_per_source);
  cummin_bound_violations += other.cummin_bound_violations;
}

BaseCase base_case(const Curve& p, const Curve& q) {
  BaseCase out;
  const Provenance base = family(PathKind::Base, 0);
  double running = 0.0;
  for (std::size_t i = 1; i <= p.segments(); ++i) {
    const CellFrame f = frame_of(cell_info(p, q, i, 1), false);
    Pwq edge = with_provenance(add_constant(integrate_abs_linear(1.0, -f.c, 0.0, f.W), running), base);
    running = edge(f.W);
    out.bottom.push_back(std::move(edge));
  }
  running = 0.0;
  for (std::size_t j = 1; j <= q.segments(); ++j) {
    const CellFrame f = frame_of(cell_info(p, q, 1, j), false);
    const double beta = f.same ? f.c : -f.c;
    Pwq edge = with_provenance(add_constant(integrate_abs_linear(1.0, beta, 0.0, f.H), running), base);
    running = edge(f.H);
    out.left.push_back(std::move(edge));
  }
  return out;
}

Quadratic PathCostSurface::along(double alpha, double beta, double t0, double t1) const {
  const double ga = ss * alpha * alpha + st * alpha + tt;
  const double gb = 2.0 * ss * alpha * beta + st * beta + s * alpha + t;
  const double gc = ss * beta * beta + s * beta + k;
  return Quadratic::from_global(ga, gb, gc, t0, t1);
}

PathCostSurface bend_surface(const CellFrame& frame, const Quadratic& piece) {
  // left(s) + (c + s) t - t^2/2 + (c - t)(H - s) + (H^2 - s^2)/2
  const double a = piece.a, b = piece.b, k = piece.c, sa = piece.lo;
  const double c = frame.c, H = frame.H;
  PathCostSurface p;
  p.ss = a - 0.5;
  p.st = 2.0;
  p.tt = -0.5;
  p.s = -2.0 * a * sa + b - c;
  p.t = c - H;
  p.k = a * sa * sa - b * sa + k + c * H + 0.5 * H * H;
  return p;
}

Pwq vertical_transport(const CellFrame& f) {
  const double c = f.c, H = f.H, W = f.W;
  if (f.same) {
    // integral of |X - c - u| for u in [0, H]
    Pwq v = add(integrate_abs_linear(1.0, -c, 0.0, W), negate(integrate_abs_linear(1.0, -c - H, 0.0, W)));
    return add_constant(std::move(v), abs_antiderivative(-c) - abs_antiderivative(-c - H));
  }
  Pwq v = add(integrate_abs_linear(1.0, H - c, 0.0, W), negate(integrate_abs_linear(1.0, -c, 0.0, W)));
  return add_constant(std::move(v), abs_antiderivative(H - c) - abs_antiderivative(-c));
}

Pwq top_transport(const CellFrame& f) {
  return f.same ? integrate_abs_linear(1.0, -(f.H + f.c), 0.0, f.W)
                : integrate_abs_linear(1.0, f.H - f.c, 0.0, f.W);
}

std::vector<Pwq> propagate_type_a(const CellFrame& frame, const Pwq& bottom, const Pwq& left,
                                  const FamilyRanks& ranks, FragmentStats* stats) {
  if (frame.same) throw Error(ErrorCode::WrongCellType, "type A needs opposite directions");
  return {vertical_fragment(frame, bottom, ranks, stats), corner_fragment(frame, left, ranks, stats)};
}

Pwq propagate_type_b(const CellFrame& frame, const Pwq& bottom, const Pwq& left,
                     const FamilyRanks& ranks, double eps, FragmentStats* stats) {
  if (!frame.has_valley(eps)) throw Error(ErrorCode::WrongCellType, "type B needs a valley");
  const double lo = frame.valley_lo(), hi = frame.valley_hi(), c = frame.c, H = frame.H;

  // Transport to the valley point (v, v - c): up from the bottom, right from the left.
  Pwq from_bottom = restrict_to(bottom, lo, hi, eps);
  from_bottom = add_quadratic(from_bottom, Quadratic::from_global(0.5, -c, 0.5 * c * c, lo, hi), eps);
  from_bottom = with_provenance(std::move(from_bottom),
                                family(PathKind::Valley, ranks.valley_bottom, 0));
  Pwq from_left = restrict_to(affine_substitute(left, 1.0, -c), lo, hi, eps);
  from_left = add_quadratic(from_left, Quadratic::from_global(0.5, 0.0, 0.0, lo, hi), eps);
  from_left = with_provenance(std::move(from_left), family(PathKind::Valley, ranks.valley_left, 1));
  note_pieces(stats, bottom.size(), from_bottom.size());
  note_pieces(stats, left.size(), from_left.size());

  const Pwq entries[] = {from_bottom, from_left};
  const Pwq entry = lower_envelope_ordered(entries, lo, hi, eps);
  Pwq ride = cumulative_min(entry, eps, HoldSlot::Valley);
  note_cummin(stats, entry, ride);
  for (auto& piece : ride.pieces()) piece.prov.rank = ranks.valley;

  // Leave the valley straight up to (v, H).
  const double e = H + c;
  return add_quadratic(ride, Quadratic::from_global(0.5, -e, 0.5 * e * e, lo, hi), eps);
}

std::vector<Pwq> propagate_type_c(const CellFrame& frame, const Pwq& bottom, const Pwq& left,
                                  const FamilyRanks& ranks, double /*eps*/, FragmentStats* stats) {
  if (!frame.same) throw Error(ErrorCode::WrongCellType, "type C needs equal directions");
  std::vector<Pwq> out;
  out.push_back(vertical_fragment(frame, bottom, ranks, stats));
  for (const auto& piece : left.pieces()) {
    Pwq frag = bend_fragment(frame, piece, ranks);
    if (frag.empty()) continue;
    note_pieces(stats, 1, frag.size());
    out.push_back(std::move(frag));
  }
  out.push_back(corner_fragment(frame, left, ranks, stats));
  return out;
}

Pwq solve_output(const CellFrame& frame, const Pwq& bottom, const Pwq& left, double eps,
                 FragmentStats* stats) {
  const FamilyRanks ranks = FamilyRanks::for_frame(frame.transposed);
  std::vector<Pwq> frags = frame.same ? propagate_type_c(frame, bottom, left, ranks, eps, stats)
                                      : propagate_type_a(frame, bottom, left, ranks, stats);
  if (frame.has_valley(eps)) frags.push_back(propagate_type_b(frame, bottom, left, ranks, eps, stats));
  const Pwq env = lower_envelope_ordered(frags, 0.0, frame.W, eps);

  // Arriving anywhere on the edge and sliding along it.
  const Pwq along = top_transport(frame);
  Pwq out = offset_cumulative_min(env, along, eps, HoldSlot::Edge);
  note_cummin(stats, env, out);
  return out;
}

CellOutput solve_cell(const Cell& cell, const Pwq& bottom, const Pwq& left, double eps) {
  CellOutput out;
  out.top = solve_output(frame_of(cell, false), bottom, left, eps, &out.stats);
  out.right = solve_output(frame_of(cell, true), left, bottom, eps, &out.stats);
  return out;
}

}  // namespace cdtw
