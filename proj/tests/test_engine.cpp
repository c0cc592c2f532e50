#include <doctest.h>

#include <random>

#include "cdtw/baselines.hpp"
#include "cdtw/engine.hpp"
#include "cdtw/error.hpp"
#include "support.hpp"

using namespace cdtw;

namespace {

void check_path(const WarpPath& path, const Curve& p, const Curve& q) {
  REQUIRE(path.points.size() >= 2);
  CHECK(path.points.front().x == 0.0);
  CHECK(path.points.front().y == 0.0);
  CHECK(path.points.back().x == doctest::Approx(p.length()));
  CHECK(path.points.back().y == doctest::Approx(q.length()));
  CHECK(path.legs.size() + 1 == path.points.size());
  for (std::size_t k = 0; k + 1 < path.points.size(); ++k) {
    const Point a = path.points[k], b = path.points[k + 1];
    CHECK(b.x >= a.x);
    CHECK(b.y >= a.y);
    CHECK((b.x > a.x || b.y > a.y));
  }
}

// Midpoint-rule integral of h along the path, independent of the library's
// exact segment integral.
double quadrature(const Curve& p, const Curve& q, const WarpPath& path) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < path.points.size(); ++k) {
    const Point a = path.points[k], b = path.points[k + 1];
    const double l1 = (b.x - a.x) + (b.y - a.y);
    const int n = 4000;
    for (int i = 0; i < n; ++i) {
      const double u = (i + 0.5) / n;
      total += height(p, q, a.x + u * (b.x - a.x), a.y + u * (b.y - a.y)) * l1 / n;
    }
  }
  return total;
}

}  // namespace

TEST_CASE("closed-form instances") {
  CHECK(cdtw_exact(Curve{0.0, 1.0, 0.0}, Curve{0.0, 1.0, 0.0}).value == doctest::Approx(0.0));
  CHECK(cdtw_exact(Curve{0.0, 1.0}, Curve{0.5, 1.5}).value == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(cdtw_exact(Curve{0.0, 1.0}, Curve{1.0, 0.0}).value == doctest::Approx(1.0).epsilon(1e-9));
  for (double d : {0.1, 0.25, 0.5, 0.9}) {
    CHECK(cdtw_exact(Curve{0.0, 1.0}, Curve{d, 1.0 + d}).value == doctest::Approx(d * d).epsilon(1e-9));
  }
}

TEST_CASE("reconstructed paths of small instances") {
  SUBCASE("identical curves follow the diagonal") {
    const Curve c{0.0, 1.0, 0.0};
    const CdtwResult r = cdtw_exact(c, c);
    REQUIRE(r.path);
    REQUIRE(r.path->points.size() == 3);
    for (const auto& pt : r.path->points) CHECK(pt.x == doctest::Approx(pt.y));
    for (auto leg : r.path->legs) CHECK(leg == LegKind::ValleyRide);
  }
  SUBCASE("shifted pair rides the valley") {
    const CdtwResult r = cdtw_exact(Curve{0.0, 1.0}, Curve{0.5, 1.5});
    REQUIRE(r.path->points.size() == 4);
    const double xs[] = {0.0, 0.5, 1.0, 1.0}, ys[] = {0.0, 0.0, 0.5, 1.0};
    for (int k = 0; k < 4; ++k) {
      CHECK(r.path->points[k].x == doctest::Approx(xs[k]));
      CHECK(r.path->points[k].y == doctest::Approx(ys[k]));
    }
    CHECK(r.path->legs[1] == LegKind::ValleyRide);
  }
  SUBCASE("equal-cost cell prefers the highest path") {
    const CdtwResult r = cdtw_exact(Curve{0.0, 1.0}, Curve{1.0, 0.0});
    REQUIRE(r.path->points.size() == 3);
    CHECK(r.path->points[1].x == doctest::Approx(0.0));
    CHECK(r.path->points[1].y == doctest::Approx(1.0));
  }
}

TEST_CASE("path certificate on random pairs") {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> size(2, 8);
  for (int it = 0; it < 40; ++it) {
    const Curve p(testing::random_series(rng, size(rng), -2.0, 2.0));
    const Curve q(testing::random_series(rng, size(rng), -2.0, 2.0));
    const CdtwResult r = cdtw_exact(p, q);
    REQUIRE(r.path);
    check_path(*r.path, p, q);
    CHECK(path_integral(p, q, *r.path) == doctest::Approx(r.value).epsilon(1e-9));
    CHECK(quadrature(p, q, *r.path) == doctest::Approx(r.value).epsilon(1e-5));
    CHECK(r.value >= 0.0);
  }
}

TEST_CASE("exact value against the brute-force lattice oracle") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> size(2, 4);
  for (int it = 0; it < 12; ++it) {
    const Curve p(testing::random_series(rng, size(rng)));
    const Curve q(testing::random_series(rng, size(rng)));
    const double exact = cdtw_exact(p, q).value;
    const double brute = cdtw_bruteforce_small(p, q, 512);
    // Midpoint weights undershoot by at most a step squared per zero crossing.
    CHECK(exact <= brute + 1e-5);
    // Staircases pay about one step of height per unit of valley they follow.
    CHECK(brute - exact <= 0.005 * (p.length() + q.length()));
  }
}

TEST_CASE("degenerate and badly scaled inputs") {
  // Integer-valued curves produce exact ties and tangent candidates; these two
  // used to trip the kink check.
  const std::vector<std::pair<Curve, Curve>> fixed = {
      {Curve{1, -1, 0.5, 0, 1, -1, 0, 0.5}, Curve{1, 0, 1}},
      {Curve{-1.0, 0.5, -2, 1, -0.5, 2, -2, -1.0, 2, -1.0, 1, -1, 0.0, -1, 0.5, -1.0, 2},
       Curve{2, -1, 2, 0, 2}},
  };
  for (const auto& [p, q] : fixed) {
    const CdtwResult r = cdtw_exact(p, q);
    REQUIRE(r.path);
    check_path(*r.path, p, q);
    CHECK(path_integral(p, q, *r.path) == doctest::Approx(r.value).epsilon(1e-9));
    CHECK(r.value <= cdtw_grid(p, q, {64, true}) + 1e-9);
  }

  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size(2, 20), level(-3, 3);
  for (int it = 0; it < 150; ++it) {
    std::vector<double> a(size(rng)), b(size(rng));
    for (double& v : a) v = level(rng);
    for (double& v : b) v = level(rng);
    a.front() = -4.0;  // keeps both curves non-constant
    b.back() = 4.0;
    const Curve p(a), q(b);
    const CdtwResult r = cdtw_exact(p, q);
    REQUIRE(r.path);
    CHECK(path_integral(p, q, *r.path) == doctest::Approx(r.value).epsilon(1e-9));
  }

  for (double scale : {1e-4, 1e4}) {
    for (int it = 0; it < 40; ++it) {
      const Curve p(testing::random_series(rng, size(rng), -scale, scale));
      const Curve q(testing::random_series(rng, size(rng), -scale, scale));
      const CdtwResult r = cdtw_exact(p, q);
      REQUIRE(r.path);
      check_path(*r.path, p, q);
      CHECK(path_integral(p, q, *r.path) == doctest::Approx(r.value).epsilon(1e-8));
    }
  }
}

TEST_CASE("symmetry, translation and scaling") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> size(2, 7);
  CdtwConfig cfg;
  cfg.record_path = false;
  for (int it = 0; it < 30; ++it) {
    const Curve p(testing::random_series(rng, size(rng), -1.0, 1.0));
    const Curve q(testing::random_series(rng, size(rng), -1.0, 1.0));
    const double v = cdtw_exact(p, q, cfg).value;
    CHECK(std::abs(cdtw_exact(q, p, cfg).value - v) <= 1e-9 * (1.0 + v));
    CHECK(std::abs(cdtw_exact(p.translated(3.5), q.translated(3.5), cfg).value - v) <= 1e-9 * (1.0 + v));
    for (double lambda : {0.5, 2.0, 10.0}) {
      const double scaled = cdtw_exact(p.scaled(lambda), q.scaled(lambda), cfg).value;
      CHECK(scaled == doctest::Approx(lambda * lambda * v).epsilon(1e-6));
    }
    CHECK(cdtw_exact(p, p, cfg).value <= 1e-9);
  }
}

TEST_CASE("statistics") {
  SUBCASE("empty before a run") {
    const SolveStats s;
    CHECK(s.total_pieces == 0);
    CHECK(s.pieces_per_level.empty());
    CHECK(s.cells_solved == 0);
    CHECK(s.bounds_ok());
  }
  SUBCASE("single cell") {
    const CdtwResult r = cdtw_exact(Curve{0.0, 1.0}, Curve{0.5, 1.5});
    CHECK(r.stats.cells_solved == 1);
    CHECK(r.stats.pieces_per_level.at(2) <= 8);
    CHECK(r.stats.bounds_ok());
  }
  SUBCASE("random runs stay inside the bounds") {
    std::mt19937_64 rng(19);
    for (int it = 0; it < 10; ++it) {
      const Curve p(testing::random_series(rng, 10)), q(testing::random_series(rng, 10));
      const CdtwResult r = cdtw_exact(p, q);
      std::size_t sum = 0;
      for (const auto& [k, v] : r.stats.pieces_per_level) sum += v;
      CHECK(sum == r.stats.total_pieces);
      CHECK(r.stats.total_pieces <= 2 * 20 * 20 * 20 * 20 * 20);
      CHECK(r.stats.bounds_ok());
      CHECK(r.stats.cells_solved == 81);
    }
  }
  SUBCASE("flags are raised when a bound is exceeded") {
    EdgeTable t;
    t.n = t.m = 1;
    std::vector<Quadratic> many;
    for (int k = 0; k < 40; ++k) many.push_back(Quadratic::from_global(0, k, 0, k, k + 1));
    t.hor = {{Pwq(many)}, {Pwq(many)}};
    t.ver = {{Pwq(many)}, {Pwq(many)}};
    SolveStats s;
    collect_stats(t, 2, 2, s);
    CHECK(s.total_pieces == 160);
    CHECK_FALSE(s.bounds_ok());
  }
}

TEST_CASE("missing provenance is reported") {
  const Curve p{0.0, 1.0, 0.0}, q{0.5, 1.5};
  CdtwRun run = solve_all(p, q);
  for (auto& row : run.edges.hor)
    for (auto& e : row)
      for (auto& piece : e.pieces()) piece.prov = Provenance{};
  for (auto& col : run.edges.ver)
    for (auto& e : col)
      for (auto& piece : e.pieces()) piece.prov = Provenance{};
  try {
    reconstruct_path(p, q, run);
    FAIL("expected ProvenanceMissing");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ProvenanceMissing);
  }
}

TEST_CASE("segment integral") {
  const Curve p{0.0, 1.0}, q{1.0, 0.0};
  // Along the bottom edge h = |x - 1|.
  CHECK(segment_integral(p, q, {0, 0}, {1, 0}) == doctest::Approx(0.5));
  // Along the diagonal h = |2x - 1|, L1 length 2.
  CHECK(segment_integral(p, q, {0, 0}, {1, 1}) == doctest::Approx(1.0));
  const Curve r{0.0, 2.0, 0.0};
  CHECK(segment_integral(r, Curve{0.0, 1.0}, {0, 0}, {4, 0}) == doctest::Approx(4.0));
}
