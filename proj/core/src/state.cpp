#include "coagflux/state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coagflux {

double power_law_integral(double prefactor, double exponent, double a, double b) {
  if (!(b > a)) return 0.0;
  if (exponent == -1.0) return prefactor * std::log(b / a);
  const double s = exponent + 1.0;
  return prefactor * (std::pow(b, s) - std::pow(a, s)) / s;
}

namespace {

struct Projector {
  const Grid& grid;
  double epsilon;
  Projection out;

  void operator()(const initial::Zero&) {}

  void operator()(const initial::PowerLaw& law) {
    if (!(law.lo > 0.0) || !(law.hi > law.lo)) {
      throw std::invalid_argument("initial: power-law support must satisfy 0 < lo < hi");
    }
    bool touched = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (grid.pivot(i) < epsilon) continue;
      const double a = std::max({grid.edge(i), law.lo, epsilon});
      const double b = std::min(grid.edge(i + 1), law.hi);
      if (b > a) {
        out.state.counts[i] += power_law_integral(law.prefactor, law.exponent, a, b);
        touched = true;
      }
    }
    out.disjoint_support = !touched;
  }

  void operator()(const initial::PointMasses& masses) {
    bool touched = masses.atoms.empty();
    for (const auto& [size, number] : masses.atoms) {
      if (!(size > 0.0) || number < 0.0) {
        throw std::invalid_argument("initial: point masses need size > 0, number >= 0");
      }
      if (size < epsilon) continue;
      const auto loc = grid.locate(size);
      if (!loc.inside() || grid.pivot(loc.index) < epsilon) continue;
      out.state.counts[loc.index] += number;
      touched = true;
    }
    out.disjoint_support = !touched;
  }
};

}  // namespace

Projection project_initial(const Grid& grid, const InitialData& data, double epsilon) {
  Projector projector{grid, epsilon, {State(grid.size()), false}};
  std::visit(projector, data);
  return std::move(projector.out);
}

double moment(const State& state, const Grid& grid, double p) {
  double total = 0.0;
  for (std::size_t i = 0; i < state.counts.size(); ++i) {
    if (state.counts[i] == 0.0) continue;
    const double x = grid.pivot(i);
    const double weight = p == 0.0 ? 1.0 : p == 1.0 ? x : std::pow(x, p);
    total += weight * state.counts[i];
  }
  return total;
}

double mass_at_or_below(const State& state, const Grid& grid, double z) {
  const std::size_t m = std::min(grid.count_pivots_at_or_below(z), state.counts.size());
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) total += grid.pivot(i) * state.counts[i];
  return total;
}

double dyadic_average(const State& state, const Grid& grid, double R, double gamma) {
  const auto window = grid.dyadic_window(R);
  const double p = 0.5 * (gamma + 3.0);
  double total = 0.0;
  for (std::size_t i = window.begin; i < window.end; ++i) {
    total += std::pow(grid.pivot(i), p) * state.counts[i];
  }
  return total / R;
}

}  // namespace coagflux
