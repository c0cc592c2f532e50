#pragma once

// Continuous piecewise-quadratic functions of one variable, the boundary cost
// functions propagated through the parameter space.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace cdtw {

inline constexpr double kDefaultEps = 1e-9;

enum class PathKind : std::uint8_t { None, Base, Vertical, Corner, Bend, Valley };

/// Which flat-extension slot a cumulative minimum records its hold point in.
enum class HoldSlot : std::uint8_t { Valley, Edge };

/// How the cost of a piece was produced. Enough to rebuild the optimal path
/// backwards through one cell.
struct Provenance {
  PathKind kind = PathKind::None;
  /// Envelope tie-break: on equal cost the higher rank wins.
  int rank = 0;
  /// Valley entry side in the solving frame: 0 = bottom, 1 = left.
  int side = 0;
  /// Bend paths: the input-edge turning coordinate is slope * t + shift.
  double turn_slope = 0.0;
  double turn_shift = 0.0;
  double hold_valley = std::numeric_limits<double>::quiet_NaN();
  double hold_edge = std::numeric_limits<double>::quiet_NaN();

  bool same_as(const Provenance& other, double eps) const;
};

/// a*(s - lo)^2 + b*(s - lo) + c on [lo, hi]. Coefficients are anchored at
/// the left end of the domain; `global()` gives the plain a s^2 + b s + c form.
struct Quadratic {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  Provenance prov{};

  static Quadratic from_global(double ga, double gb, double gc, double lo, double hi);

  double operator()(double s) const {
    const double u = s - lo;
    return (a * u + b) * u + c;
  }
  double derivative(double s) const { return 2.0 * a * (s - lo) + b; }
  double width() const { return hi - lo; }

  /// Same polynomial (and provenance) over a new domain, re-anchored at new_lo.
  Quadratic rebased(double new_lo, double new_hi) const;

  struct Global {
    double a, b, c;
  };
  Global global() const;
};

class PiecewiseQuadratic {
 public:
  PiecewiseQuadratic() = default;
  explicit PiecewiseQuadratic(std::vector<Quadratic> pieces) : pieces_(std::move(pieces)) {}
  static PiecewiseQuadratic single(const Quadratic& q) { return PiecewiseQuadratic({q}); }
  static PiecewiseQuadratic constant(double value, double lo, double hi);

  const std::vector<Quadratic>& pieces() const { return pieces_; }
  std::vector<Quadratic>& pieces() { return pieces_; }
  std::size_t size() const { return pieces_.size(); }
  bool empty() const { return pieces_.empty(); }
  double lo() const { return pieces_.front().lo; }
  double hi() const { return pieces_.back().hi; }

  /// Index of the piece covering s; at a breakpoint the left piece.
  std::size_t piece_index(double s) const;

  /// Throws OutOfDomain outside [lo - eps, hi + eps].
  double operator()(double s) const;

  /// Throws InvariantViolation on gaps, overlaps, discontinuities or
  /// convex kinks larger than `tol` (scaled by magnitude).
  void validate(double tol) const;

 private:
  std::vector<Quadratic> pieces_;
};

using Pwq = PiecewiseQuadratic;

double evaluate(const Pwq& f, double s);

/// g(t) = f(alpha * t + beta).
Pwq affine_substitute(const Pwq& f, double alpha, double beta);

/// Pointwise sum over the common domain; breakpoints are the union of both.
/// Provenance is taken from `f`.
Pwq add(const Pwq& f, const Pwq& g, double eps = kDefaultEps);
Pwq add_quadratic(const Pwq& f, const Quadratic& q, double eps = kDefaultEps);
Pwq add_constant(Pwq f, double k);
Pwq negate(Pwq f);
Pwq restrict_to(const Pwq& f, double lo, double hi, double eps = kDefaultEps);
Pwq with_provenance(Pwq f, const Provenance& prov);

/// F(x) = integral over [u0, x] of |alpha*u + beta| du, at most two pieces.
Pwq integrate_abs_linear(double alpha, double beta, double u0, double u1);

/// g(t) = min over s <= t of f(s). Flat extensions record the position where
/// the minimum was attained in `slot`. `scale` is the magnitude that rounding
/// errors in f are relative to, when f is itself a difference.
Pwq cumulative_min(const Pwq& f, double eps = kDefaultEps, HoldSlot slot = HoldSlot::Edge,
                   double scale = 0.0);

/// g(t) = min over s <= t of (f(s) - offset(s)) + offset(t).
Pwq offset_cumulative_min(const Pwq& f, const Pwq& offset, double eps = kDefaultEps,
                          HoldSlot slot = HoldSlot::Edge);

/// Pointwise minimum of candidate fragments over [lo, hi]. Fragments are
/// expected in source order; each new fragment only reworks the suffix of
/// the running envelope it overlaps. Throws CoverageGap if [lo, hi] is not
/// covered.
Pwq lower_envelope_ordered(std::span<const Pwq> candidates, double lo, double hi,
                           double eps = kDefaultEps);

/// Merges equal neighbouring pieces and absorbs pieces narrower than eps.
Pwq normalize(Pwq f, double eps = kDefaultEps);

/// Number of distinct (a, b) pairs of the global coefficients, bucketed.
std::size_t distinct_ab(const Pwq& f, double bucket = 1e-7);

/// Largest violation of "left derivative >= right derivative" at interior
/// breakpoints (0 when the rule holds).
double kink_violation(const Pwq& f);

/// Largest jump between adjacent pieces.
double continuity_gap(const Pwq& f);

}  // namespace cdtw
