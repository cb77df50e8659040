#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "coagflux/oracle.hpp"

using namespace coagflux;
using namespace coagflux::oracle;

namespace {
Grid grid_with_ratio(double ratio, std::size_t n) {
  return Grid::from_ratio(1.0 / std::sqrt(ratio), ratio, n);
}
std::vector<double> uniform(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i <= n; ++i) v.push_back(lo + (hi - lo) * i / n);
  return v;
}
}  // namespace

TEST_CASE("transform of a state") {
  const Grid g = grid_with_ratio(2.0, 3);  // pivots 1, 2, 4
  CHECK(bernstein_of_state(State(3), g, 1.0) == 0.0);
  State s(3);
  s.counts[0] = 1.0;
  CHECK(bernstein_of_state(s, g, 50.0) == doctest::Approx(1.0 - std::exp(-50.0)));
  s.counts[1] = 1.0;
  CHECK(bernstein_of_state(s, g, 1.0) == doctest::Approx(1.49679).epsilon(1e-5));
  const std::vector<double> ls = {0.5, 1.0};
  const auto eval = bernstein_of_state(s, g, ls);
  CHECK(eval.values[1] == doctest::Approx(bernstein_of_state(s, g, 1.0)));
  // Small lambda keeps full precision.
  CHECK(bernstein_of_state(s, g, 1e-12) == doctest::Approx(3e-12).epsilon(1e-10));
}

TEST_CASE("flux solution transform") {
  CHECK(analytic_flux_bernstein(0.0, 3.0) == 0.0);
  CHECK(analytic_flux_bernstein(100.0, 4.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(analytic_flux_bernstein(1.0, 1.0) == doctest::Approx(0.76159).epsilon(1e-5));
}

TEST_CASE("eps-source transform") {
  CHECK(analytic_eps_bernstein(0.0, 1.0, 1e-3) == 0.0);
  CHECK(analytic_eps_bernstein(1.0, 1.0, 1e-9) == doctest::Approx(std::tanh(1.0)).epsilon(1e-8));
  // sqrt(1 - e^-1) = 0.795060...
  CHECK(analytic_eps_bernstein(50.0, 1.0, 1.0) ==
        doctest::Approx(std::sqrt(-std::expm1(-1.0))).epsilon(1e-14));
  CHECK(analytic_eps_bernstein(50.0, 1.0, 1.0) == doctest::Approx(0.795060).epsilon(1e-6));
}

TEST_CASE("transform solves dB/dt = -B^2 + lambda") {
  for (double eps : {0.0, 1e-3}) {
    for (double t : {0.3, 1.0, 2.5}) {
      for (double l : {0.1, 1.0, 10.0}) {
        auto b = [&](double s) {
          return eps == 0.0 ? analytic_flux_bernstein(s, l) : analytic_eps_bernstein(s, l, eps);
        };
        const double q = eps == 0.0 ? l : -std::expm1(-l * eps) / eps;
        const double h = 1e-5;
        const double dbdt = (b(t + h) - b(t - h)) / (2.0 * h);
        CHECK(dbdt == doctest::Approx(-b(t) * b(t) + q).epsilon(1e-7));
      }
    }
  }
}

TEST_CASE("stationary profile") {
  CHECK(stationary_prefactor() == doctest::Approx(0.5 / std::sqrt(std::numbers::pi)));
  CHECK(stationary_density(1.0) == doctest::Approx(0.282095).epsilon(1e-6));
  CHECK(stationary_density(4.0) == doctest::Approx(0.282095 / 8.0).epsilon(1e-6));
  CHECK(constant_flux_power_law(0.0, 3.0, stationary_prefactor()) ==
        doctest::Approx(stationary_density(3.0)));
  CHECK(constant_flux_power_law(1.0, 4.0, 5.0) == doctest::Approx(5.0 / 16.0));
}

TEST_CASE("prefactor confirmed by quadrature") {
  for (double l : {0.01, 1.0, 100.0}) {
    CHECK(bernstein_of_inverse_three_halves(l) ==
          doctest::Approx(2.0 * std::sqrt(std::numbers::pi * l)).epsilon(1e-9));
  }
  CHECK(confirm_stationary_prefactor() == doctest::Approx(stationary_prefactor()).epsilon(1e-9));
}

TEST_CASE("mass transform derivative") {
  CHECK(mass_laplace_derivative(2.0, 1e-8) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(mass_laplace_derivative(0.0, 3.0) == 0.0);
  const double th = std::tanh(1.0);
  CHECK(mass_laplace_derivative(1.0, 1.0) == doctest::Approx(0.5 * th + 0.5 * (1 - th * th)));
  CHECK(mass_laplace_derivative(1.0, 1.0) == doctest::Approx(0.590784).epsilon(1e-6));
  // It is the lambda-derivative of the transform.
  const double h = 1e-6;
  CHECK(mass_laplace_derivative(1.5, 2.0) ==
        doctest::Approx((analytic_flux_bernstein(1.5, 2.0 + h) -
                         analytic_flux_bernstein(1.5, 2.0 - h)) /
                        (2.0 * h))
            .epsilon(1e-8));
}

TEST_CASE("flux solution bin counts") {
  // Transform of the bin counts on a fine grid matches the closed form.
  const Grid g = Grid::build_geometric(1e-8, 1e5, 40);
  State s(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    s.counts[i] = flux_solution_bin_count(2.0, g.edge(i), g.edge(i + 1));
  }
  for (double l : {0.3, 1.0, 5.0}) {
    CHECK(bernstein_of_state(s, g, l) ==
          doctest::Approx(analytic_flux_bernstein(2.0, l)).epsilon(2e-3));
  }
  // Relaxed at sizes well below t^2.
  const double a = 1e-2, b = 1.2e-2;
  CHECK(flux_solution_bin_count(50.0, a, b) ==
        doctest::Approx(power_law_integral(stationary_prefactor(), -1.5, a, b)).epsilon(1e-10));
  CHECK_THROWS(flux_solution_bin_count(0.0, 1.0, 2.0));
}

TEST_CASE("complete monotonicity") {
  const auto grid = uniform(0.1, 10.0, 200);
  const auto ok = complete_monotonicity_check(
      [](double l) { return analytic_flux_bernstein(1.0, l); }, grid, 4);
  CHECK(ok.passed());

  const auto square = complete_monotonicity_check([](double l) { return l * l; }, grid, 4);
  CHECK_FALSE(square.passed());
  CHECK(square.worst_order == 1);

  const auto linear = complete_monotonicity_check([](double l) { return l; }, grid, 4);
  CHECK(linear.passed());
  CHECK_THROWS(complete_monotonicity_check([](double l) { return l; }, grid, 7));
}
