#pragma once

#include <functional>
#include <span>
#include <vector>

#include "coagflux/grid.hpp"
#include "coagflux/state.hpp"

namespace coagflux::oracle {

// Closed-form references for K == 2 with unit mass injection.

/// B(lambda) = sum_i (1 - exp(-lambda x_i)) n_i.
double bernstein_of_state(const State& state, const Grid& grid, double lambda);

struct BernsteinEval {
  std::vector<double> lambda_grid;
  std::vector<double> values;
};

BernsteinEval bernstein_of_state(const State& state, const Grid& grid,
                                 std::span<const double> lambdas);

/// sqrt(lambda) tanh(sqrt(lambda) t): transform of the flux solution.
double analytic_flux_bernstein(double t, double lambda);

/// sqrt(q) tanh(sqrt(q) t), q = (1 - exp(-lambda eps)) / eps: transform of
/// the solution driven by the point source at eps.
double analytic_eps_bernstein(double t, double lambda, double epsilon);

/// Stationary density prefactor 1/(2 sqrt(pi)).
double stationary_prefactor();

/// (1/(2 sqrt(pi))) x^(-3/2).
double stationary_density(double x);

/// prefactor x^(-(gamma+3)/2).
double constant_flux_power_law(double gamma, double x, double prefactor);

/// Laplace transform of x f_t(dx): d/dlambda of the flux-solution transform.
double mass_laplace_derivative(double t, double lambda);

/// Number of particles in [a, b] for the flux solution at time t (the
/// measure whose transform is sqrt(lambda) tanh(sqrt(lambda) t)).
double flux_solution_bin_count(double t, double a, double b);

/// int_0^inf (1 - exp(-lambda x)) x^(-3/2) dx by trapezoid on x = e^s.
/// Closed form: 2 sqrt(pi lambda).
double bernstein_of_inverse_three_halves(double lambda);

/// Prefactor c for which c x^(-3/2) has transform sqrt(lambda), measured by
/// quadrature over several lambda values. Throws std::runtime_error if the
/// measurement is closer to 1/sqrt(2 pi) than to 1/(2 sqrt(pi)).
double confirm_stationary_prefactor();

struct MonotonicityReport {
  double worst = 0.0;  // most negative (-1)^n Delta^n fn' over the grid
  int worst_order = 0;
  double worst_lambda = 0.0;

  bool passed(double tolerance = -1e-6) const { return worst >= tolerance; }
};

/// fn' by central differences with step `derivative_step`, then forward
/// differences of orders 1..max_order along the (uniform) lambda grid.
MonotonicityReport complete_monotonicity_check(const std::function<double(double)>& fn,
                                               std::span<const double> lambda_grid,
                                               int max_order,
                                               double derivative_step = 1e-5);

}  // namespace coagflux::oracle
