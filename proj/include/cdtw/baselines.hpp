#pragma once

// Reference measures: discrete DTW and Fréchet on vertex lists, and two
// lattice approximations of the continuous measure used as oracles.

#include <span>
#include <vector>

#include "cdtw/curve.hpp"

namespace cdtw {

/// Sum of |p_x - q_y| over the best discrete alignment. Throws EmptyInput.
double dtw(std::span<const double> p, std::span<const double> q);

/// Max of |p_x - q_y| over the best discrete alignment. Throws EmptyInput.
double discrete_frechet(std::span<const double> p, std::span<const double> q);

struct GridConfig {
  /// Lattice points per unit arc length; 0 is rejected.
  unsigned resolution = 16;
  /// Allow diagonal moves between lattice nodes with equal x and y steps.
  bool diagonal = true;
};

/// Shortest monotone lattice path with exact edge integrals. Lattice
/// coordinates are k / resolution plus the curve end, so lattices for
/// resolutions that divide each other are nested. Throws ResolutionZero.
double cdtw_grid(const Curve& p, const Curve& q, const GridConfig& cfg);

/// Right/up staircase over a lattice of `segments` steps per unit with
/// midpoint-rule edge weights. For curves with at most 4 vertices and at
/// most 2048 steps per unit; throws TooLarge otherwise.
double cdtw_bruteforce_small(const Curve& p, const Curve& q, int segments);

}  // namespace cdtw
