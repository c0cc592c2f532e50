#include "cdtw/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cdtw/engine.hpp"
#include "cdtw/error.hpp"

namespace cdtw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class Combine>
double discrete_alignment(std::span<const double> p, std::span<const double> q, Combine combine) {
  if (p.empty() || q.empty()) throw Error(ErrorCode::EmptyInput, "vertex list is empty");
  std::vector<double> prev(q.size(), kInf), cur(q.size(), kInf);
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < q.size(); ++j) {
      const double d = std::abs(p[i] - q[j]);
      double best;
      if (i == 0 && j == 0) {
        best = 0.0;
      } else {
        best = kInf;
        if (i > 0) best = std::min(best, prev[j]);
        if (j > 0) best = std::min(best, cur[j - 1]);
        if (i > 0 && j > 0) best = std::min(best, prev[j - 1]);
      }
      cur[j] = (i == 0 && j == 0) ? d : combine(best, d);
    }
    std::swap(prev, cur);
  }
  return prev.back();
}

std::vector<double> lattice(double length, double step_count_per_unit) {
  std::vector<double> xs;
  const double step = 1.0 / step_count_per_unit;
  const double slack = 1e-12 * (1.0 + length);
  for (std::size_t k = 0;; ++k) {
    const double x = static_cast<double>(k) * step;
    if (x >= length - slack) break;
    xs.push_back(x);
  }
  xs.push_back(length);
  return xs;
}

double abs_linear_mean(double l0, double l1) {
  if ((l0 >= 0.0) == (l1 >= 0.0) || l0 == 0.0 || l1 == 0.0) return 0.5 * std::abs(l0 + l1);
  return 0.5 * (l0 * l0 + l1 * l1) / std::abs(l0 - l1);
}

// kinked[k]: a curve vertex lies strictly inside (xs[k], xs[k+1]).
std::vector<char> kinked_intervals(const Curve& c, const std::vector<double>& xs) {
  std::vector<char> out(xs.size() - 1, 0);
  const auto& pre = c.prefix_lengths();
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    auto it = std::upper_bound(pre.begin(), pre.end(), xs[k]);
    out[k] = it != pre.end() && *it < xs[k + 1];
  }
  return out;
}

}  // namespace

double dtw(std::span<const double> p, std::span<const double> q) {
  return discrete_alignment(p, q, [](double best, double d) { return best + d; });
}

double discrete_frechet(std::span<const double> p, std::span<const double> q) {
  return discrete_alignment(p, q, [](double best, double d) { return std::max(best, d); });
}

double cdtw_grid(const Curve& p, const Curve& q, const GridConfig& cfg) {
  if (cfg.resolution == 0) throw Error(ErrorCode::ResolutionZero, "grid resolution must be positive");
  const double res = static_cast<double>(cfg.resolution);
  const std::vector<double> xs = lattice(p.length(), res);
  const std::vector<double> ys = lattice(q.length(), res);
  std::vector<double> pv(xs.size()), qv(ys.size());
  for (std::size_t k = 0; k < xs.size(); ++k) pv[k] = p.point_at(xs[k]);
  for (std::size_t l = 0; l < ys.size(); ++l) qv[l] = q.point_at(ys[l]);
  const std::vector<char> kx = kinked_intervals(p, xs);
  const std::vector<char> ky = kinked_intervals(q, ys);

  auto horizontal = [&](std::size_t k, std::size_t l) {
    if (kx[k]) return segment_integral(p, q, {xs[k], ys[l]}, {xs[k + 1], ys[l]});
    return (xs[k + 1] - xs[k]) * abs_linear_mean(pv[k] - qv[l], pv[k + 1] - qv[l]);
  };
  auto vertical = [&](std::size_t k, std::size_t l) {
    if (ky[l]) return segment_integral(p, q, {xs[k], ys[l]}, {xs[k], ys[l + 1]});
    return (ys[l + 1] - ys[l]) * abs_linear_mean(pv[k] - qv[l], pv[k] - qv[l + 1]);
  };
  auto diagonal = [&](std::size_t k, std::size_t l) {
    const double dx = xs[k + 1] - xs[k], dy = ys[l + 1] - ys[l];
    if (kx[k] || ky[l]) return segment_integral(p, q, {xs[k], ys[l]}, {xs[k + 1], ys[l + 1]});
    return (dx + dy) * abs_linear_mean(pv[k] - qv[l], pv[k + 1] - qv[l + 1]);
  };

  // Diagonals only join nodes with equal steps, which keeps nested lattices nested.
  const double step_tol = 1e-12 / res;
  std::vector<double> prev(xs.size(), kInf), cur(xs.size(), kInf);
  for (std::size_t l = 0; l < ys.size(); ++l) {
    for (std::size_t k = 0; k < xs.size(); ++k) {
      double best = (k == 0 && l == 0) ? 0.0 : kInf;
      if (k > 0) best = std::min(best, cur[k - 1] + horizontal(k - 1, l));
      if (l > 0) best = std::min(best, prev[k] + vertical(k, l - 1));
      if (cfg.diagonal && k > 0 && l > 0 &&
          std::abs((xs[k] - xs[k - 1]) - (ys[l] - ys[l - 1])) <= step_tol) {
        best = std::min(best, prev[k - 1] + diagonal(k - 1, l - 1));
      }
      cur[k] = best;
    }
    std::swap(prev, cur);
  }
  return prev.back();
}

double cdtw_bruteforce_small(const Curve& p, const Curve& q, int segments) {
  if (p.size() > 4 || q.size() > 4) {
    throw Error(ErrorCode::TooLarge, "brute-force oracle takes at most 4 vertices per curve");
  }
  if (segments <= 0 || segments > 2048) {
    throw Error(ErrorCode::TooLarge, "segments per unit must be in 1..2048, got " +
                                         std::to_string(segments));
  }
  const std::vector<double> xs = lattice(p.length(), segments);
  const std::vector<double> ys = lattice(q.length(), segments);
  std::vector<double> pv(xs.size()), pm(xs.size()), qv(ys.size()), qm(ys.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    pv[k] = p.point_at(xs[k]);
    if (k + 1 < xs.size()) pm[k] = p.point_at(0.5 * (xs[k] + xs[k + 1]));
  }
  for (std::size_t l = 0; l < ys.size(); ++l) {
    qv[l] = q.point_at(ys[l]);
    if (l + 1 < ys.size()) qm[l] = q.point_at(0.5 * (ys[l] + ys[l + 1]));
  }
  std::vector<double> prev(xs.size(), kInf), cur(xs.size(), kInf);
  for (std::size_t l = 0; l < ys.size(); ++l) {
    for (std::size_t k = 0; k < xs.size(); ++k) {
      double best = (k == 0 && l == 0) ? 0.0 : kInf;
      if (k > 0) best = std::min(best, cur[k - 1] + (xs[k] - xs[k - 1]) * std::abs(pm[k - 1] - qv[l]));
      if (l > 0) best = std::min(best, prev[k] + (ys[l] - ys[l - 1]) * std::abs(pv[k] - qm[l - 1]));
      cur[k] = best;
    }
    std::swap(prev, cur);
  }
  return prev.back();
}

}  // namespace cdtw
