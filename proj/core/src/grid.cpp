#include "coagflux/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace coagflux {

namespace {

constexpr double kWindowSlack = 1e-12;

}  // namespace

Grid::Grid(std::vector<double> edges, double ratio)
    : edges_(std::move(edges)), ratio_(ratio), log_ratio_(std::log(ratio)) {
  pivots_.resize(edges_.size() - 1);
  for (std::size_t i = 0; i + 1 < edges_.size(); ++i) {
    pivots_[i] = std::sqrt(edges_[i] * edges_[i + 1]);
  }
}

Grid Grid::build_geometric(double x_min, double x_max, int bins_per_decade) {
  if (!(x_min > 0.0) || !std::isfinite(x_max)) {
    throw std::invalid_argument("grid: x_min must be positive and x_max finite");
  }
  if (!(x_min < x_max)) {
    throw std::invalid_argument("grid: x_min must be strictly below x_max");
  }
  if (bins_per_decade < 1) {
    throw std::invalid_argument("grid: bins_per_decade must be at least 1");
  }
  const double decades = std::log10(x_max / x_min);
  // Guard against log10 landing a hair above an integer bin count.
  const auto bins =
      static_cast<std::size_t>(std::ceil(bins_per_decade * decades - 1e-9));
  const double ratio = std::pow(10.0, 1.0 / bins_per_decade);
  Grid grid = from_ratio(x_min, ratio, std::max<std::size_t>(bins, 1));
  if (grid.edges_.back() < x_max) {
    // Only reachable through the 1e-9 guard, so the ratio drift is ~1e-15.
    grid.edges_.back() = x_max;
    grid.pivots_.back() = std::sqrt(grid.edges_[grid.size() - 1] * x_max);
  }
  return grid;
}

Grid Grid::from_ratio(double first_edge, double ratio, std::size_t bins) {
  if (!(first_edge > 0.0) || !std::isfinite(first_edge)) {
    throw std::invalid_argument("grid: first edge must be positive and finite");
  }
  if (!(ratio > 1.0) || !std::isfinite(ratio)) {
    throw std::invalid_argument("grid: edge ratio must exceed 1");
  }
  if (bins == 0) {
    throw std::invalid_argument("grid: at least one bin is required");
  }
  std::vector<double> edges(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    edges[i] = first_edge * std::pow(ratio, static_cast<double>(i));
  }
  return Grid(std::move(edges), ratio);
}

Grid::Location Grid::locate(double x) const {
  if (!(x > 0.0)) {
    throw std::invalid_argument("grid: locate requires a positive size, got " +
                                std::to_string(x));
  }
  if (x < edges_.front()) return {Location::Where::below, 0};
  if (x >= edges_.back()) return {Location::Where::above, 0};

  const double guess = std::floor(std::log(x / edges_.front()) / log_ratio_);
  auto i = static_cast<std::size_t>(
      std::clamp(guess, 0.0, static_cast<double>(size() - 1)));
  // The logarithm can be off by one near an edge; settle against the edges.
  while (i > 0 && x < edges_[i]) --i;
  while (i + 1 < size() && x >= edges_[i + 1]) ++i;
  return {Location::Where::inside, i};
}

Grid::IndexRange Grid::dyadic_window(double R) const {
  if (!(R > 0.0)) {
    throw std::invalid_argument("grid: dyadic window needs R > 0");
  }
  const double lo = 0.5 * R * (1.0 - kWindowSlack);
  const double hi = R * (1.0 + kWindowSlack);
  auto first = std::lower_bound(pivots_.begin(), pivots_.end(), lo);
  auto last = std::upper_bound(pivots_.begin(), pivots_.end(), hi);
  IndexRange range;
  range.begin = static_cast<std::size_t>(first - pivots_.begin());
  range.end = static_cast<std::size_t>(last - pivots_.begin());
  if (range.end < range.begin) range.end = range.begin;
  return range;
}

std::size_t Grid::count_pivots_at_or_below(double z) const {
  return static_cast<std::size_t>(
      std::upper_bound(pivots_.begin(), pivots_.end(), z) - pivots_.begin());
}

}  // namespace coagflux
