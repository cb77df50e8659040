// Acceptance suite: one PASS/FAIL line per criterion, at the stated tolerances.
// Exit status is the number of failed criteria.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "coagflux/coag_op.hpp"
#include "coagflux/diagnostics.hpp"
#include "coagflux/flux.hpp"
#include "coagflux/kernel.hpp"
#include "coagflux/oracle.hpp"
#include "coagflux/stepper.hpp"

using namespace coagflux;
namespace dg = coagflux::diagnostics;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& what) {
  if (!pass) ++failures;
  fmt::print("criterion {}: {} {}\n", id, pass ? "PASS" : "FAIL", what);
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ScenarioConfig unit_source(double horizon, KernelSpec kernel = KernelSpec::constant(2.0),
                           double x_max = 1e6) {
  ScenarioConfig c;
  c.kernel = kernel;
  c.grid = {1e-4, x_max, 8};
  c.source = {1e-4, 1.0};
  c.snap_epsilon_to_pivot = true;
  c.horizon = horizon;
  return c;
}

struct Tally {
  std::size_t records = 0;
  std::size_t failed = 0;
  std::string first;

  void add(const std::vector<DiagnosticRecord>& rs) {
    for (const auto& r : rs) {
      ++records;
      if (!r.pass) {
        if (failed++ == 0) {
          first = fmt::format("{} t={:.4g} observed={:.6g} bound={:.6g} {}", r.name, r.time,
                              r.observed, r.bound_or_target, r.detail);
        }
      }
    }
  }
  std::string summary() const {
    return failed == 0 ? fmt::format("{} records", records)
                       : fmt::format("{}/{} failed, first: {}", failed, records, first);
  }
};

// 1
void mass_growth(const Trajectory& traj, double runtime) {
  const State& last = traj.samples.back().state;
  const double m1 = traj.samples.back().moments.m1;
  const double growth = std::abs(m1 + last.leaked_top_mass - 5.0) / 5.0;
  double worst_budget = 0.0;
  for (const Sample& s : traj.samples) {
    const double lhs = s.moments.m1 + s.state.leaked_top_mass - s.state.clipped_mass;
    const double rhs = traj.initial_mass() + s.state.injected_mass;
    worst_budget = std::max(worst_budget, std::abs(lhs - rhs) / std::max(rhs, 1e-300));
  }
  const bool pass = growth <= 1e-3 && worst_budget <= 1e-8 && runtime <= 30.0 &&
                    traj.stats.valid();
  report(1, pass,
         fmt::format("|M1+leak-5|/5={:.3e} (<=1e-3), budget={:.3e} (<=1e-8), leak={:.3e}, "
                     "runtime={:.1f}s (<=30), steps={}",
                     growth, worst_budget, last.leaked_top_mass, runtime, traj.stats.steps));
}

double transform_error(const Trajectory& traj, const std::vector<double>& times,
                       const std::vector<double>& lambdas) {
  double worst = 0.0;
  for (double t : times) {
    const State& s = traj.samples[traj.nearest_sample(t)].state;
    for (double l : lambdas) {
      const double exact = oracle::analytic_eps_bernstein(s.time, l, traj.source.epsilon);
      worst = std::max(worst,
                       std::abs(oracle::bernstein_of_state(s, traj.grid, l) - exact) / exact);
    }
  }
  return worst;
}

// 2
void eps_transform(const Trajectory& traj) {
  const std::vector<double> times = {0.5, 1.0, 2.0, 5.0};
  const std::vector<double> lambdas = {0.1, 0.3, 1.0, 3.0, 10.0};
  const double worst = transform_error(traj, times, lambdas);

  // Time-stepping order: fixed Heun steps h, h/2, h/4 (dt_min = dt_max); the
  // successive differences should shrink by about 4.
  auto heun = [&](double dt) {
    ScenarioConfig c = unit_source(0.5);
    c.control.method = StepMethod::heun;
    c.control.dt_min = dt;
    c.control.dt_max = dt;
    c.control.sample_every = 0.5;
    const Trajectory t = run(c);
    return oracle::bernstein_of_state(t.samples.back().state, t.grid, 1.0);
  };
  const double b1 = heun(2e-3), b2 = heun(1e-3), b3 = heun(5e-4);
  const double ratio = std::abs(b1 - b2) / std::abs(b2 - b3);
  const bool pass = worst <= 2e-2 && ratio > 3.0 && ratio < 5.0;
  report(2, pass,
         fmt::format("max rel transform error={:.3e} (<=2e-2), dt-halving ratio={:.2f} "
                     "(second order ~4)",
                     worst, ratio));
}

// 3
void stationary(double runtime_budget) {
  double prefactor = 0.0;
  try {
    prefactor = oracle::confirm_stationary_prefactor();
  } catch (const std::exception& e) {
    report(3, false, fmt::format("prefactor check failed: {}", e.what()));
    return;
  }
  const auto t0 = std::chrono::steady_clock::now();
  const Trajectory traj = run(unit_source(50.0));
  const double runtime = seconds_since(t0);
  const State& last = traj.samples.back().state;
  dg::StationaryWindow window;
  window.x_lo = 10.0 * traj.source.epsilon;
  window.x_hi = 1e-2 * traj.grid.upper();
  const auto lambdas = dg::log_spaced(1.0, 100.0, 41);
  const auto d = dg::stationary_distance(last, traj.grid, 0.0, prefactor, window, lambdas);
  const bool pass = d.density <= 0.1 && d.bernstein <= 5e-2 && runtime <= runtime_budget;

  // Context for the density figure: the exact solution at the same time,
  // compared with the stationary profile and with the numerical one.
  double exact_vs_profile = 0.0, exact_at = 0.0, numeric_vs_exact = 0.0;
  for (std::size_t i = 0; i < traj.grid.size(); ++i) {
    const double x = traj.grid.pivot(i);
    if (x < window.x_lo || x > window.x_hi) continue;
    const double a = traj.grid.edge(i), b = traj.grid.edge(i + 1);
    const double exact = oracle::flux_solution_bin_count(last.time, a, b);
    const double profile = power_law_integral(prefactor, -1.5, a, b);
    if (std::abs(exact - profile) / profile > exact_vs_profile) {
      exact_vs_profile = std::abs(exact - profile) / profile;
      exact_at = x;
    }
    numeric_vs_exact = std::max(numeric_vs_exact, std::abs(last.counts[i] - exact) / exact);
  }
  dg::StationaryWindow relaxed = window;
  relaxed.x_hi = 100.0;  // well inside x << T^2
  const auto r = dg::stationary_distance(last, traj.grid, 0.0, prefactor, relaxed);
  report(3, pass,
         fmt::format("prefactor={:.12f}, density dev={:.3e} at x={:.3g} (<=0.1, {} bins), "
                     "transform dev/sqrt(l)={:.3e} (<=5e-2), runtime={:.1f}s; exact solution "
                     "at T deviates {:.3e} at x={:.3g}, numeric vs exact {:.3e}, density dev "
                     "on [10 eps, 100] {:.3e}",
                     prefactor, d.density, d.worst_size, d.bins_compared, d.bernstein,
                     runtime, exact_vs_profile, exact_at, numeric_vs_exact, r.density));
}

// 4
void constant_flux() {
  const auto t0 = std::chrono::steady_clock::now();
  const Grid grid = Grid::build_geometric(1e-6, 1e6, 16);
  const State state =
      project_initial(grid,
                      initial::PowerLaw{oracle::stationary_prefactor(), -1.5, grid.lower(),
                                        grid.upper()},
                      grid.lower())
          .state;
  const KernelSpec k = KernelSpec::constant(2.0);
  double lo = 1e300, hi = -1e300, atomic_lo = 1e300, atomic_hi = -1e300;
  for (double z : dg::log_spaced(1e-2, 1e2, 20)) {
    const double j = resolved_flux(state, grid, k, z);
    lo = std::min(lo, j);
    hi = std::max(hi, j);
    const double a = quadrature_flux(state, grid, k, z);
    atomic_lo = std::min(atomic_lo, a);
    atomic_hi = std::max(atomic_hi, a);
  }
  const double runtime = seconds_since(t0);
  report(4, lo >= 0.98 && hi <= 1.02 && runtime <= 5.0,
         fmt::format("J in [{:.5f}, {:.5f}] (within [0.98, 1.02]); atomic pivot sum in "
                     "[{:.4f}, {:.4f}]; runtime={:.2f}s",
                     lo, hi, atomic_lo, atomic_hi, runtime));
}

// 5-7 on one trajectory
struct PropertyOutcome {
  Tally bounds, partition, regions, continuity;
};

PropertyOutcome properties(const Trajectory& traj) {
  PropertyOutcome out;
  const double c_prime = lower_bound_constant(traj.kernel);
  const auto sizes = dg::dyadic_sizes(traj.grid.lower(), traj.grid.upper());
  out.bounds.add(dg::dyadic_bound_check(traj, traj.kernel.gamma, c_prime, sizes));
  out.bounds.add(dg::near_zero_mass_check(traj, traj.kernel.gamma, c_prime, sizes));
  out.partition.add(dg::flux_partition_check(traj));
  out.regions.add(dg::region_monotonicity_check(traj));
  out.continuity.add(dg::continuity_check(traj));
  return out;
}

// 8
void oracle_selftests() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ut(0.05, 5.0), ul(-2.0, 2.0);
  double worst_ode = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double t = ut(rng), l = std::pow(10.0, ul(rng));
    const double h = 1e-5 * t;
    const double dbdt = (oracle::analytic_flux_bernstein(t + h, l) -
                         oracle::analytic_flux_bernstein(t - h, l)) /
                        (2.0 * h);
    const double b = oracle::analytic_flux_bernstein(t, l);
    worst_ode = std::max(worst_ode, std::abs(dbdt + b * b - l) / std::max(1.0, l));
  }
  std::vector<double> lambdas;
  for (int i = 0; i <= 200; ++i) lambdas.push_back(0.1 + 9.9 * i / 200.0);
  const auto cm = oracle::complete_monotonicity_check(
      [](double l) { return oracle::analytic_flux_bernstein(1.0, l); }, lambdas, 4);
  double worst_limit = 0.0;
  for (double t : {0.5, 1.0, 2.0, 5.0}) {
    worst_limit = std::max(worst_limit, std::abs(oracle::mass_laplace_derivative(t, 1e-14) - t));
  }
  report(8, worst_ode <= 1e-6 && cm.passed() && worst_limit <= 1e-6,
         fmt::format("ODE residual={:.2e} (<=1e-6), monotonicity worst={:.2e} (>=-1e-6), "
                     "|dB/dl(0)-t|={:.2e} (<=1e-6)",
                     worst_ode, cm.worst, worst_limit));
}

// 9
void weak_form() {
  const Grid grid = Grid::build_geometric(1e-3, 1e3, 6);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<std::pair<std::string, std::function<double(double)>>> phis = {
      {"x", [](double x) { return x; }},
      {"1-exp(-x)", [](double x) { return 1.0 - std::exp(-x); }},
      {"sqrt(x)", [](double x) { return std::sqrt(x); }},
      {"min(x,1)", [](double x) { return std::min(x, 1.0); }},
  };
  double worst = 0.0, worst_mass = 0.0;
  const KernelSpec kernels[] = {KernelSpec::constant(2.0),
                                KernelSpec::power_pair(0.5, -0.25, 1.0, 1.0)};
  for (int k = 0; k < 10; ++k) {
    State s(grid.size());
    // Support in the lower half so no product leaves the grid.
    for (std::size_t i = 0; i < grid.size() / 2; ++i) s.counts[i] = u(rng) * u(rng);
    const KernelSpec& kernel = kernels[k % 2];
    const RhsBreakdown rhs = assemble_rhs(s, grid, kernel, SourceSpec{grid.pivot(0), 0.0},
                                          TruncationPolicy::truncate_top);
    if (rhs.truncated_event_rate != 0.0) {
      report(9, false, "random state produced top events");
      return;
    }
    for (const auto& [name, f] : phis) {
      // The scheme places products on pivots, so the identity holds for the
      // piecewise-linear interpolant of phi.
      std::vector<double> values;
      for (double x : grid.pivots()) values.push_back(f(x));
      const TestFunction phi = TestFunction::piecewise_linear(grid, values);
      double lhs = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        lhs += phi.at_pivots[i] * (rhs.gain[i] + rhs.loss[i]);
        scale += std::abs(phi.at_pivots[i]) * (std::abs(rhs.gain[i]) + std::abs(rhs.loss[i]));
      }
      const double rhs_value = weak_pairing(s, grid, kernel, phi);
      const double err = std::abs(lhs - rhs_value) / scale;
      if (name == "x") worst_mass = std::max(worst_mass, std::abs(lhs) / scale);
      worst = std::max(worst, err);
    }
  }
  report(9, worst <= 1e-10 && worst_mass <= 1e-10,
         fmt::format("max relative mismatch={:.2e} (<=1e-10), phi=x residual={:.2e}", worst,
                     worst_mass));
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  const Trajectory base = run(unit_source(5.0));
  const double runtime = seconds_since(t0);

  mass_growth(base, runtime);
  eps_transform(base);
  stationary(60.0);
  constant_flux();

  struct Case {
    std::string label;
    PropertyOutcome outcome;
  };
  std::vector<Case> cases;
  cases.push_back({"K=2", properties(base)});
  const std::pair<double, double> exps[] = {{0.5, -0.25}, {-0.5, 0.25}, {0.0, 0.4}};
  // x_max = 1e3 here: with lambda > 0 the largest bins sweep up source
  // particles at a rate ~ (x_max / eps)^lambda, which sets the explicit step
  // even when those bins are numerically empty. By T = 5 almost no mass gets
  // that far (the top leak is metered and checked by the budget anyway).
  for (const auto& [g, l] : exps) {
    const auto t1 = std::chrono::steady_clock::now();
    const Trajectory traj = run(unit_source(5.0, KernelSpec::power_pair(g, l, 1.0, 1.0), 1e3));
    cases.push_back({fmt::format("gamma={},lambda={} ({:.1f}s, leak {:.1e})", g, l,
                                 seconds_since(t1), traj.samples.back().state.leaked_top_mass),
                     properties(traj)});
  }
  auto summarize = [&](int id, auto member) {
    bool pass = true;
    std::string text;
    for (const auto& c : cases) {
      const Tally& t = c.outcome.*member;
      pass = pass && t.failed == 0 && t.records > 0;
      text += fmt::format("[{}: {}] ", c.label, t.summary());
    }
    return std::make_pair(pass, text);
  };
  {
    auto [pass, text] = summarize(5, &PropertyOutcome::bounds);
    report(5, pass, text);
  }
  {
    auto [p1, t1] = summarize(6, &PropertyOutcome::partition);
    auto [p2, t2] = summarize(6, &PropertyOutcome::regions);
    report(6, p1 && p2, "partition " + t1 + "; monotone in delta " + t2);
  }
  {
    auto [pass, text] = summarize(7, &PropertyOutcome::continuity);
    report(7, pass, text);
  }
  oracle_selftests();
  weak_form();
  fmt::print("{} of 9 criteria failed\n", failures);
  return failures;
}
