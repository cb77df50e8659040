#pragma once

#include <span>
#include <vector>

#include "coagflux/grid.hpp"
#include "coagflux/record.hpp"
#include "coagflux/state.hpp"
#include "coagflux/stepper.hpp"

namespace coagflux::diagnostics {

/// Budget identity M1(t) + leaked - clipped = M1(0) + injected (relative 1e-8)
/// and the leak-corrected growth M1(t) + leaked = M1(0) + t * mass_rate
/// (relative 1e-3).
std::vector<DiagnosticRecord> mass_budget_check(const Trajectory& traj,
                                                const SourceSpec& source);

/// Ratio of the time-integrated ledger flux at z to t * mass_rate, for every probe in
/// `z_sequence` and every sample. Each ratio record passes when the ratio has
/// not decreased since the previous sample (slack 1e-9). For the smallest z in
/// [eps, 4 eps] an extra "boundary_flux_limit" record per sample with t >= 1
/// passes when the ratio lies in [0.9, 1].
std::vector<DiagnosticRecord> boundary_flux_check(const Trajectory& traj,
                                                  std::span<const double> z_sequence);

/// C_T = ((T + M1(f0)) / C')^(1/2).
double dyadic_constant(double horizon, double initial_mass, double c_prime);

/// T^(1/2) (1 - 2^(-(1-gamma)/2))^(-1) C_T.
double near_zero_constant(double horizon, double initial_mass, double c_prime, double gamma);

/// For each R: int_0^t A_R ds <= C_T and int_0^t A_R^2 ds <= (t + M1(f0)) / C'
/// at every sample, with A_R the dyadic average and trapezoidal time quadrature.
std::vector<DiagnosticRecord> dyadic_bound_check(const Trajectory& traj, double gamma,
                                                 double c_prime,
                                                 std::span<const double> r_set);

/// int_0^t sum_{x_i <= x0} x_i n_i ds <= Cbar_T x0^((1-gamma)/2) at every sample.
std::vector<DiagnosticRecord> near_zero_mass_check(const Trajectory& traj, double gamma,
                                                   double c_prime,
                                                   std::span<const double> x0_set);

/// J1 + J2 + J3 = J to relative 1e-12 on every sample, probe and delta.
std::vector<DiagnosticRecord> flux_partition_check(const Trajectory& traj);

/// Time-integrated J1 per probe, and J3 averaged over the probes in each
/// dyadic window [z/2, z], are nonincreasing as delta decreases.
std::vector<DiagnosticRecord> region_monotonicity_check(const Trajectory& traj);

/// Per sampling interval and probe:
///   |Delta M1(<= z) + int J_ledger dt - 1{eps <= z} mass_rate Delta t|
///     <= 1e-8 max(M1, t).
std::vector<DiagnosticRecord> continuity_check(const Trajectory& traj);

/// No sampled count is negative.
std::vector<DiagnosticRecord> positivity_check(const Trajectory& traj);

struct StationaryWindow {
  double x_lo = 0.0;
  double x_hi = 0.0;
  std::ptrdiff_t exclude_bin = -1;  // typically the injection bin
};

struct StationaryDistance {
  double density = 0.0;     // max relative bin deviation in the window
  double worst_size = 0.0;  // pivot where it occurs
  std::size_t bins_compared = 0;
  double bernstein = 0.0;  // sup |B_num - sqrt(l) tanh(sqrt(l) t)| / sqrt(l)
};

/// Compares the state with the bin integrals of prefactor x^(-(gamma+3)/2)
/// over bins whose pivots lie in the window, and (when `lambdas` is non-empty)
/// the transform with the constant-kernel flux solution at the state's time.
StationaryDistance stationary_distance(const State& state, const Grid& grid, double gamma,
                                       double prefactor, const StationaryWindow& window,
                                       std::span<const double> lambdas = {});

/// Log-spaced values between lo and hi inclusive.
std::vector<double> log_spaced(double lo, double hi, std::size_t count);

/// Powers of two within [lo, hi].
std::vector<double> dyadic_sizes(double lo, double hi);

struct VerificationReport {
  std::vector<DiagnosticRecord> records;

  bool all_pass() const;
  std::size_t failures() const;
};

/// All trajectory checks with default sets: R and x0 over the dyadic sizes
/// inside the grid, z over the probes.
VerificationReport verify(const Trajectory& traj);

}  // namespace coagflux::diagnostics
