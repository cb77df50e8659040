#pragma once

#include <utility>
#include <variant>
#include <vector>

#include "coagflux/grid.hpp"

namespace coagflux {

/// Discrete size distribution: n_i particles per unit volume sitting at pivot
/// x_i, plus the mass meters the stepper advances.
struct State {
  double time = 0.0;
  std::vector<double> counts;
  double leaked_top_mass = 0.0;  // removed by top-boundary truncation
  double injected_mass = 0.0;    // added by the source (pivot mass)
  double clipped_mass = 0.0;     // added back when negative counts are clipped

  State() = default;
  explicit State(std::size_t bins) : counts(bins, 0.0) {}
};

namespace initial {

struct Zero {};

/// Density prefactor * x^exponent on [lo, hi].
struct PowerLaw {
  double prefactor = 1.0;
  double exponent = -1.5;
  double lo = 0.0;
  double hi = 0.0;
};

struct PointMasses {
  std::vector<std::pair<double, double>> atoms;  // (size, number)
};

}  // namespace initial

using InitialData = std::variant<initial::Zero, initial::PowerLaw, initial::PointMasses>;

struct Projection {
  State state;
  bool disjoint_support = false;  // data never touched the grid above epsilon
};

/// Restricts the data to [epsilon, inf) and places it on the grid. Bins whose
/// pivot lies below epsilon are left empty; power laws are integrated exactly
/// over each bin.
Projection project_initial(const Grid& grid, const InitialData& data, double epsilon);

/// Exact integral of prefactor * x^exponent over [a, b] (0 when b <= a).
double power_law_integral(double prefactor, double exponent, double a, double b);

/// M_p = sum_i x_i^p n_i.
double moment(const State& state, const Grid& grid, double p);

/// Mass held in bins with pivot <= z.
double mass_at_or_below(const State& state, const Grid& grid, double z);

/// (1/R) * sum over pivots in [R/2, R] of x_i^((gamma+3)/2) n_i.
double dyadic_average(const State& state, const Grid& grid, double R, double gamma);

}  // namespace coagflux
