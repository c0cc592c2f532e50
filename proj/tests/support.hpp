#pragma once

// Helpers shared by the test binaries: random inputs and small oracles that
// do not go through the library's own algorithms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "cdtw/pwq.hpp"

namespace testing {

/// n values in [lo, hi] with distinct neighbours.
inline std::vector<double> random_series(std::mt19937_64& rng, int n, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v;
  while (static_cast<int>(v.size()) < n) {
    const double x = u(rng);
    if (v.empty() || std::abs(x - v.back()) > 1e-6) v.push_back(x);
  }
  return v;
}

inline std::vector<double> random_ints(std::mt19937_64& rng, int n, int lo, int hi) {
  std::uniform_int_distribution<int> u(lo, hi);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = u(rng);
  return v;
}

/// Minimum over every alignment (steps (1,0), (0,1), (1,1)) of the sum or
/// the max of |p_i - q_j|, by plain recursion.
inline double enumerate_alignments(const std::vector<double>& p, const std::vector<double>& q,
                                   bool use_max) {
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t j,
                                                                   double acc) {
    const double d = std::abs(p[i] - q[j]);
    acc = use_max ? std::max(acc, d) : acc + d;
    if (i + 1 == p.size() && j + 1 == q.size()) {
      best = std::min(best, acc);
      return;
    }
    if (i + 1 < p.size()) walk(i + 1, j, acc);
    if (j + 1 < q.size()) walk(i, j + 1, acc);
    if (i + 1 < p.size() && j + 1 < q.size()) walk(i + 1, j + 1, acc);
  };
  walk(0, 0, 0.0);
  return best;
}

/// Integral of |u| over [u0, u1].
inline double abs_integral(double u0, double u1) {
  auto g = [](double u) { return 0.5 * u * std::abs(u); };
  return g(u1) - g(u0);
}

/// Height of a canonical cell at (x, y).
struct Frame {
  double W, H, c;
  bool same;
  double h(double x, double y) const { return same ? std::abs(x - y - c) : std::abs(x + y - c); }
  /// Exact integral of h along an axis-parallel leg.
  double leg(double x0, double y0, double x1, double y1) const {
    if (y0 == y1) {
      return same ? abs_integral(x0 - y0 - c, x1 - y0 - c) : abs_integral(x0 + y0 - c, x1 + y0 - c);
    }
    return same ? abs_integral(x0 - y1 - c, x0 - y0 - c) : abs_integral(x0 + y0 - c, x0 + y1 - c);
  }
};

/// Cost of a random monotone staircase from a to b with `turns` corners.
inline double random_staircase(std::mt19937_64& rng, const Frame& f, double ax, double ay, double bx,
                               double by, int turns) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> xs{ax, bx}, ys{ay, by};
  for (int k = 0; k < turns; ++k) {
    xs.push_back(ax + (bx - ax) * u(rng));
    ys.push_back(ay + (by - ay) * u(rng));
  }
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const bool horizontal_first = u(rng) < 0.5;
  double cost = 0.0, x = ax, y = ay;
  for (std::size_t k = 1; k < xs.size(); ++k) {
    if (horizontal_first) {
      cost += f.leg(x, y, xs[k], y);
      x = xs[k];
      cost += f.leg(x, y, x, ys[k]);
      y = ys[k];
    } else {
      cost += f.leg(x, y, x, ys[k]);
      y = ys[k];
      cost += f.leg(x, y, xs[k], y);
      x = xs[k];
    }
  }
  return cost;
}

/// Random continuous piecewise quadratic on [lo, hi].
inline cdtw::Pwq random_pwq(std::mt19937_64& rng, double lo, double hi, int pieces, double scale = 1.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0), coef(-scale, scale);
  std::vector<double> cuts{lo, hi};
  for (int k = 1; k < pieces; ++k) cuts.push_back(lo + (hi - lo) * u(rng));
  std::sort(cuts.begin(), cuts.end());
  std::vector<cdtw::Quadratic> out;
  double value = coef(rng);
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    if (!(cuts[k + 1] > cuts[k])) continue;
    cdtw::Quadratic q;
    q.a = coef(rng);
    q.b = coef(rng);
    q.c = value;
    q.lo = cuts[k];
    q.hi = cuts[k + 1];
    value = q(q.hi);
    out.push_back(q);
  }
  return cdtw::Pwq(std::move(out));
}

/// Min of f over [f.lo(), t] by dense sampling plus the exact end points.
inline double sampled_prefix_min(const cdtw::Pwq& f, double t, int samples) {
  double best = f(f.lo());
  for (int k = 0; k <= samples; ++k) {
    const double s = f.lo() + (t - f.lo()) * k / samples;
    best = std::min(best, f(s));
  }
  for (const auto& q : f.pieces()) {
    if (q.lo > t) break;
    // Vertex of each piece, if it lies in range.
    if (q.a != 0.0) {
      const double v = q.lo - q.b / (2.0 * q.a);
      if (v >= q.lo && v <= std::min(q.hi, t)) best = std::min(best, q(v));
    }
    best = std::min(best, q(std::min(q.hi, t)));
  }
  return best;
}

}  // namespace testing
