#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "coagflux/grid.hpp"

using coagflux::Grid;
using Where = Grid::Location::Where;

TEST_CASE("one decade, one bin") {
  const Grid g = Grid::build_geometric(1.0, 10.0, 1);
  REQUIRE(g.size() == 1);
  CHECK(g.edge(0) == 1.0);
  CHECK(g.edge(1) == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(g.pivot(0) == doctest::Approx(std::sqrt(10.0)).epsilon(1e-14));
}

TEST_CASE("eight decades at eight bins per decade") {
  const Grid g = Grid::build_geometric(1e-4, 1e4, 8);
  CHECK(g.size() == 64);
  CHECK(g.ratio() == doctest::Approx(std::pow(10.0, 1.0 / 8.0)).epsilon(1e-14));
  CHECK(g.upper() == doctest::Approx(1e4).epsilon(1e-12));
}

TEST_CASE("empty or invalid ranges are rejected") {
  CHECK_THROWS_AS(Grid::build_geometric(1.0, 1.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(Grid::build_geometric(2.0, 1.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(Grid::build_geometric(0.0, 1.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(Grid::build_geometric(1.0, 10.0, 0), std::invalid_argument);
}

TEST_CASE("locate uses half-open bins") {
  const Grid g = Grid::build_geometric(1.0, 10.0, 1);
  auto loc = g.locate(3.0);
  CHECK(loc.where == Where::inside);
  CHECK(loc.index == 0);
  CHECK(g.locate(1.0).where == Where::inside);
  CHECK(g.locate(10.0).where == Where::above);
  CHECK(g.locate(0.5).where == Where::below);
  CHECK_THROWS(g.locate(0.0));
  CHECK_THROWS(g.locate(-1.0));
}

TEST_CASE("locate agrees with the edges on a fine grid") {
  const Grid g = Grid::build_geometric(1e-4, 1e6, 8);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(g.locate(g.pivot(i)).index == i);
    CHECK(g.locate(g.edge(i)).index == i);
  }
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-4.0, 6.0);
  for (int k = 0; k < 2000; ++k) {
    const double x = std::pow(10.0, u(rng));
    const auto loc = g.locate(x);
    REQUIRE(loc.inside());
    CHECK(g.edge(loc.index) <= x);
    CHECK(x < g.edge(loc.index + 1));
  }
}

TEST_CASE("pivots are geometric midpoints") {
  const Grid g = Grid::build_geometric(1e-3, 1e3, 5);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(g.pivot(i) == doctest::Approx(std::sqrt(g.edge(i) * g.edge(i + 1))).epsilon(1e-14));
    CHECK(g.edge(i + 1) / g.edge(i) == doctest::Approx(g.ratio()).epsilon(1e-12));
  }
}

TEST_CASE("dyadic window") {
  // Pivots 1, 2, 4, 8.
  const Grid g = Grid::from_ratio(1.0 / std::sqrt(2.0), 2.0, 4);
  REQUIRE(g.pivot(0) == doctest::Approx(1.0));
  REQUIRE(g.pivot(3) == doctest::Approx(8.0));

  auto w = g.dyadic_window(4.0);
  CHECK(w.begin == 1);
  CHECK(w.end == 3);

  w = g.dyadic_window(8.0);
  CHECK(w.begin == 2);
  CHECK(w.end == 4);

  CHECK(g.dyadic_window(0.5).empty());
  CHECK(g.dyadic_window(100.0).empty());
  CHECK_THROWS(g.dyadic_window(0.0));
}

TEST_CASE("count_pivots_at_or_below") {
  const Grid g = Grid::from_ratio(1.0 / std::sqrt(2.0), 2.0, 4);
  CHECK(g.count_pivots_at_or_below(0.5) == 0);
  CHECK(g.count_pivots_at_or_below(1.0) == 1);
  CHECK(g.count_pivots_at_or_below(3.0) == 2);
  CHECK(g.count_pivots_at_or_below(1e9) == 4);
}
