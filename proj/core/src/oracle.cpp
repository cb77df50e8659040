#include "coagflux/oracle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace coagflux::oracle {

double bernstein_of_state(const State& state, const Grid& grid, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("bernstein: lambda must be positive");
  double total = 0.0;
  for (std::size_t i = 0; i < state.counts.size(); ++i) {
    if (state.counts[i] == 0.0) continue;
    total += -std::expm1(-lambda * grid.pivot(i)) * state.counts[i];
  }
  return total;
}

BernsteinEval bernstein_of_state(const State& state, const Grid& grid,
                                 std::span<const double> lambdas) {
  BernsteinEval eval;
  eval.lambda_grid.assign(lambdas.begin(), lambdas.end());
  eval.values.reserve(lambdas.size());
  for (double lambda : lambdas) eval.values.push_back(bernstein_of_state(state, grid, lambda));
  return eval;
}

double analytic_flux_bernstein(double t, double lambda) {
  const double root = std::sqrt(lambda);
  return root * std::tanh(root * t);
}

double analytic_eps_bernstein(double t, double lambda, double epsilon) {
  const double q = -std::expm1(-lambda * epsilon) / epsilon;
  const double root = std::sqrt(q);
  return root * std::tanh(root * t);
}

double stationary_prefactor() { return 0.5 / std::sqrt(std::numbers::pi); }

double stationary_density(double x) { return stationary_prefactor() * std::pow(x, -1.5); }

double constant_flux_power_law(double gamma, double x, double prefactor) {
  return prefactor * std::pow(x, -0.5 * (gamma + 3.0));
}

double mass_laplace_derivative(double t, double lambda) {
  const double root = std::sqrt(lambda);
  const double th = std::tanh(root * t);
  return 0.5 * th / root + 0.5 * t * (1.0 - th * th);
}

double flux_solution_bin_count(double t, double a, double b) {
  if (!(t > 0.0) || !(a > 0.0) || !(b > a)) {
    throw std::invalid_argument("oracle: need t > 0 and 0 < a < b");
  }
  // tanh(z)/z = sum_k 2 / (z^2 + c_k^2), c_k = (k - 1/2) pi, so the density
  // is (2/t) sum_k b_k exp(-b_k x) with b_k = c_k^2 / t^2.
  double sum = 0.0;
  for (long k = 1;; ++k) {
    const double c = (static_cast<double>(k) - 0.5) * std::numbers::pi / t;
    const double rate = c * c;
    const double term = std::exp(-rate * a) * -std::expm1(-rate * (b - a));
    sum += term;
    if (rate * a > 40.0 && term <= 1e-18 * sum) break;
  }
  return 2.0 * sum / t;
}

double bernstein_of_inverse_three_halves(double lambda) {
  // Integrand in s = log x: (1 - exp(-lambda e^s)) e^(-s/2), decaying
  // exponentially in both directions, so the trapezoid rule converges fast.
  const double centre = -std::log(lambda);
  constexpr double kHalfWidth = 90.0;
  constexpr int kSteps = 18000;
  const double h = 2.0 * kHalfWidth / kSteps;
  double total = 0.0;
  for (int k = 0; k <= kSteps; ++k) {
    const double s = centre - kHalfWidth + h * k;
    const double x = std::exp(s);
    const double value = -std::expm1(-lambda * x) * std::exp(-0.5 * s);
    total += (k == 0 || k == kSteps) ? 0.5 * value : value;
  }
  return total * h;
}

double confirm_stationary_prefactor() {
  const double lambdas[] = {0.01, 1.0, 100.0};
  double sum = 0.0;
  for (double lambda : lambdas) {
    sum += std::sqrt(lambda) / bernstein_of_inverse_three_halves(lambda);
  }
  const double measured = sum / 3.0;
  const double quarter_pi = 0.5 / std::sqrt(std::numbers::pi);
  const double half_pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  if (std::abs(measured - half_pi) <= std::abs(measured - quarter_pi) ||
      std::abs(measured - quarter_pi) > 1e-8) {
    throw std::runtime_error(
        "stationary prefactor check failed: quadrature gives " + std::to_string(measured) +
        ", expected 1/(2 sqrt(pi))");
  }
  return measured;
}

MonotonicityReport complete_monotonicity_check(const std::function<double(double)>& fn,
                                               std::span<const double> lambda_grid,
                                               int max_order, double derivative_step) {
  if (max_order < 1 || max_order > 6) {
    throw std::invalid_argument("monotonicity: max_order must be in [1, 6]");
  }
  std::vector<double> diff;
  diff.reserve(lambda_grid.size());
  for (double lambda : lambda_grid) {
    diff.push_back((fn(lambda + derivative_step) - fn(lambda - derivative_step)) /
                   (2.0 * derivative_step));
  }
  MonotonicityReport report;
  double sign = 1.0;
  for (int order = 1; order <= max_order && diff.size() > 1; ++order) {
    sign = -sign;
    for (std::size_t k = 0; k + 1 < diff.size(); ++k) {
      diff[k] = diff[k + 1] - diff[k];
      const double signed_value = sign * diff[k];
      if (signed_value < report.worst) {
        report.worst = signed_value;
        report.worst_order = order;
        report.worst_lambda = lambda_grid[k];
      }
    }
    diff.pop_back();
  }
  return report;
}

}  // namespace coagflux::oracle
