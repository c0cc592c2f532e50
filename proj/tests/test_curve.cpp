#include <doctest.h>

#include "cdtw/curve.hpp"
#include "cdtw/error.hpp"

using namespace cdtw;

TEST_CASE("curve arc length and evaluation") {
  const Curve c{0.0, 2.0, 1.0, 1.0, 3.0};
  CHECK(c.size() == 4);  // the repeated 1.0 collapses
  CHECK(c.length() == doctest::Approx(5.0));
  CHECK(c.point_at(0.0) == 0.0);
  CHECK(c.point_at(1.5) == doctest::Approx(1.5));
  CHECK(c.point_at(2.5) == doctest::Approx(1.5));
  CHECK(c.point_at(5.0) == doctest::Approx(3.0));
  CHECK(c.direction(0) == 1);
  CHECK(c.direction(1) == -1);
  CHECK(c.segment_at(2.0) == 0);
  CHECK(c.segment_at(2.0001) == 1);
  CHECK_THROWS_AS(c.point_at(5.1), Error);
  CHECK_THROWS_AS(c.point_at(-0.1), Error);
}

TEST_CASE("curve rejects degenerate input") {
  CHECK_THROWS_AS(Curve({1.0}), Error);
  CHECK_THROWS_AS(Curve({2.0, 2.0, 2.0}), Error);
  try {
    Curve({});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientVertices);
  }
}

TEST_CASE("scaling and translation") {
  const Curve c{0.0, 1.0, -1.0};
  CHECK(c.scaled(2.0).length() == doctest::Approx(6.0));
  CHECK(c.translated(5.0).point_at(1.0) == doctest::Approx(6.0));
}

TEST_CASE("height function") {
  const Curve p{0.0, 1.0}, q{1.0, 0.0};
  CHECK(height(p, q, 0.0, 0.0) == doctest::Approx(1.0));
  CHECK(height(p, q, 0.5, 0.5) == doctest::Approx(0.0));
  CHECK(height(p, q, 1.0, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("cell geometry") {
  SUBCASE("same direction with a valley") {
    const Curve p{0.0, 1.0}, q{0.5, 1.5};
    const Cell cell = cell_info(p, q, 1, 1);
    CHECK(cell.same_direction());
    CHECK(cell.offset == doctest::Approx(0.5));
    REQUIRE(cell.valley.has_value());
    CHECK(cell.valley->from.x == doctest::Approx(0.5));
    CHECK(cell.valley->from.y == doctest::Approx(0.0));
    CHECK(cell.valley->to.x == doctest::Approx(1.0));
    CHECK(cell.valley->to.y == doctest::Approx(0.5));
  }
  SUBCASE("opposite directions have no valley") {
    const Curve p{0.0, 1.0}, q{1.0, 0.0};
    const Cell cell = cell_info(p, q, 1, 1);
    CHECK_FALSE(cell.same_direction());
    CHECK_FALSE(cell.valley.has_value());
    // |x + y - offset| vanishes on x + y = 1.
    CHECK(cell.offset == doctest::Approx(1.0));
  }
  SUBCASE("valley that only touches a corner") {
    const Curve p{0.0, 1.0}, q{1.0, 2.0};
    const Cell cell = cell_info(p, q, 1, 1);
    CHECK_FALSE(cell.valley.has_value());
    CHECK(cell.valley_degenerate);
  }
  SUBCASE("valley height is zero along the segment") {
    const Curve p{0.0, 3.0, 1.0}, q{2.0, 0.5, 2.5};
    for (std::size_t i = 1; i <= 2; ++i) {
      for (std::size_t j = 1; j <= 2; ++j) {
        const Cell cell = cell_info(p, q, i, j);
        if (!cell.valley) continue;
        for (double u : {0.0, 0.3, 1.0}) {
          const double x = cell.valley->from.x + u * (cell.valley->to.x - cell.valley->from.x);
          const double y = cell.valley->from.y + u * (cell.valley->to.y - cell.valley->from.y);
          CHECK(height(p, q, x, y) == doctest::Approx(0.0).epsilon(1e-12));
        }
      }
    }
  }
  CHECK_THROWS_AS(cell_info(Curve{0.0, 1.0}, Curve{0.0, 1.0}, 2, 1), Error);
  CHECK_THROWS_AS(cell_info(Curve{0.0, 1.0}, Curve{0.0, 1.0}, 0, 1), Error);
}
