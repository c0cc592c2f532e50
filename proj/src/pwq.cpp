#include "cdtw/pwq.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>

#include "cdtw/error.hpp"

namespace cdtw {

namespace {

bool close(double a, double b, double eps) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  return std::abs(a - b) <= eps * (1.0 + std::abs(a) + std::abs(b));
}

double domain_slack(double lo, double hi, double eps) {
  return eps * (1.0 + std::abs(lo) + std::abs(hi));
}

void set_hold(Provenance& prov, HoldSlot slot, double pos) {
  double& target = slot == HoldSlot::Valley ? prov.hold_valley : prov.hold_edge;
  if (std::isnan(target)) target = pos;
}

// Roots of a u^2 + b u + c strictly inside (0, w).
std::vector<double> roots_inside(double a, double b, double c, double w) {
  std::vector<double> out;
  auto keep = [&](double r) {
    if (std::isfinite(r) && r > 0.0 && r < w) out.push_back(r);
  };
  if (a == 0.0) {
    if (b != 0.0) keep(-c / b);
  } else {
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return out;
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
    if (q != 0.0) {
      keep(q / a);
      keep(c / q);
    } else {
      keep(0.0);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Winner of two quadratics over [u, v], split at their crossings.
void emit_min(const Quadratic& p, const Quadratic& q, double u, double v, double eps,
              std::vector<Quadratic>& out) {
  const Quadratic pr = p.rebased(u, v);
  const Quadratic qr = q.rebased(u, v);
  const double w = v - u;
  std::vector<double> cuts{0.0};
  for (double r : roots_inside(pr.a - qr.a, pr.b - qr.b, pr.c - qr.c, w)) cuts.push_back(r);
  cuts.push_back(w);
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double s0 = u + cuts[k];
    const double s1 = k + 2 == cuts.size() ? v : u + cuts[k + 1];
    if (!(s1 > s0)) continue;
    const double mid = 0.5 * (s0 + s1);
    const double dm = pr(mid) - qr(mid);
    const double d0 = pr(s0) - qr(s0);
    const double d1 = pr(s1) - qr(s1);
    const double scale = 1.0 + std::abs(pr(mid));
    const bool tie = std::max({std::abs(dm), std::abs(d0), std::abs(d1)}) <= eps * scale;
    const Quadratic* win = nullptr;
    if (tie) {
      win = qr.prov.rank > pr.prov.rank ? &qr : &pr;
    } else {
      // Mean difference, not the midpoint alone: a tangency at mid reads as zero.
      win = d0 + 4.0 * dm + d1 <= 0.0 ? &pr : &qr;
    }
    out.push_back(win->rebased(s0, s1));
  }
}

// Pointwise min of two sorted piece lists that may each contain gaps.
std::vector<Quadratic> merge_min(const std::vector<Quadratic>& a, const std::vector<Quadratic>& b,
                                 double eps) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  std::vector<double> cuts;
  cuts.reserve(2 * (a.size() + b.size()));
  for (const auto& p : a) {
    cuts.push_back(p.lo);
    cuts.push_back(p.hi);
  }
  for (const auto& p : b) {
    cuts.push_back(p.lo);
    cuts.push_back(p.hi);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<Quadratic> out;
  std::size_t ia = 0, ib = 0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double u = cuts[k], v = cuts[k + 1];
    const double mid = 0.5 * (u + v);
    while (ia < a.size() && a[ia].hi < mid) ++ia;
    while (ib < b.size() && b[ib].hi < mid) ++ib;
    const Quadratic* pa = (ia < a.size() && a[ia].lo <= mid) ? &a[ia] : nullptr;
    const Quadratic* pb = (ib < b.size() && b[ib].lo <= mid) ? &b[ib] : nullptr;
    if (pa && pb) {
      emit_min(*pa, *pb, u, v, eps, out);
    } else if (pa) {
      out.push_back(pa->rebased(u, v));
    } else if (pb) {
      out.push_back(pb->rebased(u, v));
    }
  }
  return normalize(Pwq(std::move(out)), eps).pieces();
}

// First u in [u1, u2] where a decreasing quadratic reaches `target`.
double descend_to(const Quadratic& q, double target, double u1, double u2) {
  double lo = u1, hi = u2;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (q(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

bool Provenance::same_as(const Provenance& o, double eps) const {
  return kind == o.kind && rank == o.rank && side == o.side && close(turn_slope, o.turn_slope, eps) &&
         close(turn_shift, o.turn_shift, eps) && close(hold_valley, o.hold_valley, eps) &&
         close(hold_edge, o.hold_edge, eps);
}

Quadratic Quadratic::from_global(double ga, double gb, double gc, double lo, double hi) {
  Quadratic q;
  q.a = ga;
  q.b = 2.0 * ga * lo + gb;
  q.c = (ga * lo + gb) * lo + gc;
  q.lo = lo;
  q.hi = hi;
  return q;
}

Quadratic Quadratic::rebased(double new_lo, double new_hi) const {
  Quadratic q = *this;
  const double d = new_lo - lo;
  q.b = 2.0 * a * d + b;
  q.c = (a * d + b) * d + c;
  q.lo = new_lo;
  q.hi = new_hi;
  return q;
}

Quadratic::Global Quadratic::global() const {
  return {a, b - 2.0 * a * lo, (a * lo - b) * lo + c};
}

Pwq PiecewiseQuadratic::constant(double value, double lo, double hi) {
  Quadratic q;
  q.c = value;
  q.lo = lo;
  q.hi = hi;
  return single(q);
}

std::size_t PiecewiseQuadratic::piece_index(double s) const {
  auto it = std::lower_bound(pieces_.begin(), pieces_.end(), s,
                             [](const Quadratic& q, double x) { return q.hi < x; });
  if (it == pieces_.end()) return pieces_.size() - 1;
  return static_cast<std::size_t>(it - pieces_.begin());
}

double PiecewiseQuadratic::operator()(double s) const {
  if (pieces_.empty()) throw Error(ErrorCode::OutOfDomain, "empty function");
  const double slack = domain_slack(lo(), hi(), kDefaultEps);
  if (!(s >= lo() - slack && s <= hi() + slack)) {
    throw Error(ErrorCode::OutOfDomain, std::to_string(s) + " outside [" + std::to_string(lo()) +
                                            ", " + std::to_string(hi()) + "]");
  }
  return pieces_[piece_index(s)](s);
}

void PiecewiseQuadratic::validate(double tol) const {
  if (pieces_.empty()) throw Error(ErrorCode::InvariantViolation, "empty function");
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const auto& p = pieces_[k];
    if (!(p.lo <= p.hi) || !std::isfinite(p.a) || !std::isfinite(p.b) || !std::isfinite(p.c)) {
      throw Error(ErrorCode::InvariantViolation, "malformed piece " + std::to_string(k));
    }
    if (k + 1 == pieces_.size()) break;
    const auto& n = pieces_[k + 1];
    if (std::abs(p.hi - n.lo) > domain_slack(p.hi, n.lo, tol)) {
      throw Error(ErrorCode::InvariantViolation, "gap or overlap at piece " + std::to_string(k));
    }
    const double vl = p(p.hi), vr = n(n.lo);
    if (std::abs(vl - vr) > tol * (1.0 + std::abs(vl))) {
      throw Error(ErrorCode::InvariantViolation,
                  "discontinuity " + std::to_string(vl - vr) + " at " + std::to_string(p.hi));
    }
  }

  // Kink rule. Pieces narrower than `fine` are rounding debris whose own
  // slopes mean little, so the check steps over them and compares the wide
  // neighbours, extrapolating the left one across the debris.
  const double fine = tol * (1.0 + hi() - lo());
  std::size_t prev = pieces_.size();
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const auto& n = pieces_[k];
    const bool last_or_first = k == 0 || k + 1 == pieces_.size();
    if (n.width() < fine && !last_or_first) continue;
    if (prev < pieces_.size()) {
      const auto& p = pieces_[prev];
      const double dl = p.derivative(n.lo), dr = n.derivative(n.lo);
      // Crossings picked within a value tolerance d can misplace a breakpoint
      // by sqrt(d / |a diff|), which shows up as a slope jump of order sqrt(d).
      const double wobble = 4.0 * std::sqrt(kDefaultEps * (1.0 + std::abs(n(n.lo))));
      if (dr - dl > tol * (1.0 + std::abs(dl) + std::abs(dr)) + wobble) {
        throw Error(ErrorCode::InvariantViolation, "convex kink at " + std::to_string(n.lo));
      }
    }
    prev = k;
  }
}

double evaluate(const Pwq& f, double s) { return f(s); }

Pwq affine_substitute(const Pwq& f, double alpha, double beta) {
  if (alpha == 0.0) throw Error(ErrorCode::InvariantViolation, "affine_substitute with alpha = 0");
  std::vector<Quadratic> out;
  out.reserve(f.size());
  for (const auto& p : f.pieces()) {
    const double t_a = (p.lo - beta) / alpha;
    const double t_b = (p.hi - beta) / alpha;
    Quadratic q = p;
    q.lo = std::min(t_a, t_b);
    q.hi = std::max(t_a, t_b);
    // s - p.lo = alpha * (t - q.lo) + d
    const double d = alpha * q.lo + beta - p.lo;
    q.a = p.a * alpha * alpha;
    q.b = (2.0 * p.a * d + p.b) * alpha;
    q.c = (p.a * d + p.b) * d + p.c;
    if (alpha == 1.0) {
      q.b = p.b;
      q.c = p.c;
    }
    out.push_back(q);
  }
  if (alpha < 0.0) std::reverse(out.begin(), out.end());
  return Pwq(std::move(out));
}

Pwq add(const Pwq& f, const Pwq& g, double eps) {
  if (f.empty() || g.empty()) throw Error(ErrorCode::InvariantViolation, "add on empty function");
  const double slack = domain_slack(f.lo(), f.hi(), eps);
  if (std::abs(f.lo() - g.lo()) > slack || std::abs(f.hi() - g.hi()) > slack) {
    throw Error(ErrorCode::OutOfDomain, "add: domains differ");
  }
  const auto& fp = f.pieces();
  const auto& gp = g.pieces();
  std::vector<Quadratic> out;
  out.reserve(fp.size() + gp.size());
  const double end = f.hi();
  // The last piece of each operand is stretched to `end`.
  auto f_hi = [&](std::size_t k) { return k + 1 == fp.size() ? end : fp[k].hi; };
  auto g_hi = [&](std::size_t k) { return k + 1 == gp.size() ? end : gp[k].hi; };
  std::size_t i = 0, j = 0;
  double u = f.lo();
  for (;;) {
    const double v = std::min({f_hi(i), g_hi(j), end});
    if (v > u) {
      Quadratic q = fp[i].rebased(u, v);
      const Quadratic r = gp[j].rebased(u, v);
      q.a += r.a;
      q.b += r.b;
      q.c += r.c;
      out.push_back(q);
      u = v;
    }
    if (v >= end) break;
    if (f_hi(i) <= v) ++i;
    if (g_hi(j) <= v) ++j;
  }
  if (out.empty()) {
    Quadratic q = fp.front().rebased(f.lo(), end);
    const Quadratic r = gp.front().rebased(f.lo(), end);
    q.a += r.a;
    q.b += r.b;
    q.c += r.c;
    out.push_back(q);
  }
  out.back().hi = end;
  return normalize(Pwq(std::move(out)), eps);
}

Pwq add_quadratic(const Pwq& f, const Quadratic& q, double eps) {
  return add(f, Pwq::single(q.rebased(f.lo(), f.hi())), eps);
}

Pwq add_constant(Pwq f, double k) {
  for (auto& p : f.pieces()) p.c += k;
  return f;
}

Pwq negate(Pwq f) {
  for (auto& p : f.pieces()) {
    p.a = -p.a;
    p.b = -p.b;
    p.c = -p.c;
  }
  return f;
}

Pwq restrict_to(const Pwq& f, double lo, double hi, double eps) {
  std::vector<Quadratic> out;
  for (const auto& p : f.pieces()) {
    const double l = std::max(p.lo, lo);
    const double h = std::min(p.hi, hi);
    if (h > l) out.push_back(p.rebased(l, h));
  }
  if (out.empty()) {
    // Degenerate restriction: keep a zero-width piece at the clamped point.
    const double x = std::clamp(lo, f.lo(), f.hi());
    out.push_back(f.pieces()[f.piece_index(x)].rebased(x, x));
    return Pwq(std::move(out));
  }
  return normalize(Pwq(std::move(out)), eps);
}

Pwq with_provenance(Pwq f, const Provenance& prov) {
  for (auto& p : f.pieces()) p.prov = prov;
  return f;
}

Pwq integrate_abs_linear(double alpha, double beta, double u0, double u1) {
  if (!(u0 <= u1)) throw Error(ErrorCode::OutOfDomain, "integrate_abs_linear: u0 > u1");
  auto one_sided = [&](double sign) {
    Quadratic q;
    q.a = sign * alpha / 2.0;
    q.b = sign * (alpha * u0 + beta);
    q.c = 0.0;
    q.lo = u0;
    q.hi = u1;
    return q;
  };
  if (alpha == 0.0) {
    Quadratic q;
    q.b = std::abs(beta);
    q.lo = u0;
    q.hi = u1;
    return Pwq::single(q);
  }
  const double root = -beta / alpha;
  if (!(root > u0 && root < u1)) {
    const double mid = 0.5 * (u0 + u1);
    const double sign = alpha * mid + beta >= 0.0 ? 1.0 : -1.0;
    return Pwq::single(one_sided(sign));
  }
  Quadratic first = one_sided(alpha * u0 + beta >= 0.0 ? 1.0 : -1.0);
  first.hi = root;
  Quadratic second;
  second.a = std::abs(alpha) / 2.0;
  second.b = 0.0;
  second.c = first(root);
  second.lo = root;
  second.hi = u1;
  return Pwq({first, second});
}

Pwq cumulative_min(const Pwq& f, double eps, HoldSlot slot, double scale) {
  if (f.empty()) return f;
  std::vector<Quadratic> out;
  out.reserve(2 * f.size() + 1);

  double best = f.pieces().front()(f.lo());
  double best_pos = f.lo();
  Provenance best_prov = f.pieces().front().prov;

  auto emit_flat = [&](double l, double r) {
    Quadratic q;
    q.c = best;
    q.lo = l;
    q.hi = r;
    q.prov = best_prov;
    set_hold(q.prov, slot, best_pos);
    out.push_back(q);
  };

  for (const auto& q : f.pieces()) {
    double cuts[3] = {q.lo, q.hi, q.hi};
    int ncuts = 2;
    if (q.a != 0.0) {
      const double vx = q.lo - q.b / (2.0 * q.a);
      if (vx > q.lo && vx < q.hi) {
        cuts[1] = vx;
        cuts[2] = q.hi;
        ncuts = 3;
      }
    }
    for (int k = 0; k + 1 < ncuts; ++k) {
      const double u1 = cuts[k], u2 = cuts[k + 1];
      if (!(u2 > u1)) continue;
      const double q1 = q(u1), q2 = q(u2);
      const double slack = 4.0 * eps * (1.0 + std::max(std::abs(best), scale));
      if (q2 >= q1) {
        if (q1 < best) {
          best = q1;
          best_pos = u1;
          best_prov = q.prov;
        }
        emit_flat(u1, u2);
      } else if (q1 <= best + slack) {
        out.push_back(q.rebased(u1, u2));
        best = q2;
        best_pos = u2;
        best_prov = q.prov;
      } else if (q2 >= best) {
        emit_flat(u1, u2);
      } else {
        const double cross = descend_to(q, best, u1, u2);
        emit_flat(u1, cross);
        out.push_back(q.rebased(cross, u2));
        best = q2;
        best_pos = u2;
        best_prov = q.prov;
      }
    }
  }
  return normalize(Pwq(std::move(out)), eps);
}

Pwq offset_cumulative_min(const Pwq& f, const Pwq& offset, double eps, HoldSlot slot) {
  const Pwq shifted = add(f, negate(offset), eps);
  double scale = 0.0;
  for (const auto& p : f.pieces()) scale = std::max({scale, std::abs(p(p.lo)), std::abs(p(p.hi))});
  return add(cumulative_min(shifted, eps, slot, scale), offset, eps);
}

Pwq lower_envelope_ordered(std::span<const Pwq> candidates, double lo, double hi, double eps) {
  std::vector<Quadratic> env;
  for (const auto& cand : candidates) {
    if (cand.empty()) continue;
    const double start = cand.lo();
    std::size_t keep = env.size();
    while (keep > 0 && env[keep - 1].hi > start) --keep;
    std::vector<Quadratic> suffix(env.begin() + static_cast<std::ptrdiff_t>(keep), env.end());
    env.resize(keep);
    auto merged = merge_min(suffix, cand.pieces(), eps);
    env.insert(env.end(), merged.begin(), merged.end());
  }

  const double slack = domain_slack(lo, hi, eps) * 10.0;
  std::vector<Quadratic> out;
  for (const auto& p : env) {
    const double l = std::max(p.lo, lo);
    const double h = std::min(p.hi, hi);
    if (h > l) out.push_back(p.rebased(l, h));
  }
  if (out.empty() || out.front().lo > lo + slack || out.back().hi < hi - slack) {
    throw Error(ErrorCode::CoverageGap, "envelope does not cover [" + std::to_string(lo) + ", " +
                                            std::to_string(hi) + "]");
  }
  out.front() = out.front().rebased(lo, out.front().hi);
  out.back().hi = hi;
  for (std::size_t k = 0; k + 1 < out.size(); ++k) {
    const double gap = out[k + 1].lo - out[k].hi;
    if (gap > slack) {
      throw Error(ErrorCode::CoverageGap, "envelope gap at " + std::to_string(out[k].hi));
    }
    out[k].hi = out[k + 1].lo;
  }
  return normalize(Pwq(std::move(out)), eps);
}

Pwq normalize(Pwq f, double eps) {
  auto& in = f.pieces();
  if (in.size() <= 1) return f;
  std::vector<Quadratic> out;
  out.reserve(in.size());
  bool pending = false;
  double pending_lo = 0.0;
  for (const auto& piece : in) {
    Quadratic p = piece;
    if (pending) {
      p = p.rebased(pending_lo, p.hi);
      pending = false;
    }
    const bool abuts = !out.empty() && std::abs(p.lo - out.back().hi) <= domain_slack(p.lo, p.lo, eps);
    if (p.width() < eps) {
      if (abuts) {
        out.back().hi = p.hi;
        continue;
      }
      if (out.empty() || !abuts) {
        // Merge forward into the next abutting piece if there is one.
        pending = true;
        pending_lo = p.lo;
        continue;
      }
    }
    if (abuts) {
      Quadratic& prev = out.back();
      if (prev.prov.same_as(p.prov, eps)) {
        const double m = 0.5 * (p.lo + p.hi);
        const double tol = eps * 1e-3;
        bool same = true;
        for (double s : {p.lo, m, p.hi}) {
          const double x = prev(s), y = p(s);
          if (std::abs(x - y) > tol * (1.0 + std::abs(x))) {
            same = false;
            break;
          }
        }
        if (same) {
          prev.hi = p.hi;
          continue;
        }
      }
      if (p.lo != prev.hi) p = p.rebased(prev.hi, p.hi);
    }
    out.push_back(p);
  }
  if (pending) {
    if (!out.empty()) {
      out.back().hi = std::max(out.back().hi, in.back().hi);
    } else {
      out.push_back(in.back());
    }
  }
  f.pieces() = std::move(out);
  return f;
}

std::size_t distinct_ab(const Pwq& f, double bucket) {
  std::set<std::pair<long long, long long>> seen;
  for (const auto& p : f.pieces()) {
    const auto g = p.global();
    seen.emplace(std::llround(g.a / bucket), std::llround(g.b / bucket));
  }
  return seen.size();
}

double kink_violation(const Pwq& f) {
  double worst = 0.0;
  const auto& ps = f.pieces();
  for (std::size_t k = 0; k + 1 < ps.size(); ++k) {
    const double dl = ps[k].derivative(ps[k].hi);
    const double dr = ps[k + 1].derivative(ps[k + 1].lo);
    worst = std::max(worst, dr - dl);
  }
  return worst;
}

double continuity_gap(const Pwq& f) {
  double worst = 0.0;
  const auto& ps = f.pieces();
  for (std::size_t k = 0; k + 1 < ps.size(); ++k) {
    worst = std::max(worst, std::abs(ps[k](ps[k].hi) - ps[k + 1](ps[k + 1].lo)));
  }
  return worst;
}

}  // namespace cdtw
