#pragma once

#include <optional>
#include <span>
#include <vector>

#include "coagflux/coag_op.hpp"
#include "coagflux/grid.hpp"
#include "coagflux/kernel.hpp"
#include "coagflux/state.hpp"

namespace coagflux {

/// Mass flux across size z for an atomic state:
///   J(z) = sum over ordered pivot pairs with x_i <= z < x_i + x_j of
///          x_i K(x_i, x_j) n_i n_j.
double quadrature_flux(const State& state, const Grid& grid, const KernelTable& table,
                       double z);
double quadrature_flux(const State& state, const Grid& grid, const KernelSpec& kernel,
                       double z);

/// Contributions of the pairs with y >= x/delta (j1), delta x < y < x/delta
/// (j2) and y <= delta x (j3), where x is the pair member at or below z.
struct FluxRegions {
  double j1 = 0.0;
  double j2 = 0.0;
  double j3 = 0.0;

  double total() const { return j1 + j2 + j3; }
};

FluxRegions region_split_flux(const State& state, const Grid& grid,
                              const KernelTable& table, double z, double delta);
FluxRegions region_split_flux(const State& state, const Grid& grid,
                              const KernelSpec& kernel, double z, double delta);

/// Scheme-exact rate at which mass leaves {x <= z}:
///   -sum_{x_i <= z} x_i (gain_i + loss_i).
/// Above the last pivot this equals the top leak rate.
double ledger_flux(const RhsBreakdown& rhs, const Grid& grid, double z);

/// Flux of the continuum density reconstructed from the bin counts. Each
/// bin is given a power-law density fitted to its neighbours; the y-member is
/// resolved on `subcells` log-uniform subcells per bin and the x-member is
/// integrated in closed form (constant kernel) or by Gauss-Legendre. Meant for
/// states that sample a density, where the atomic sum aliases badly.
double resolved_flux(const State& state, const Grid& grid, const KernelSpec& kernel,
                     double z, int subcells = 32);

/// Probe sizes with per-probe instantaneous flux and its running time integral.
struct FluxProfile {
  std::vector<double> probes;
  std::vector<double> j_values;
  std::optional<std::vector<FluxRegions>> j_regions;
  std::vector<double> time_integrated;
  bool started = false;

  explicit FluxProfile(std::vector<double> probe_sizes = {});
};

/// Trapezoidal update: integral += dt (J_prev + J_now) / 2, then J_prev = J_now.
/// The first call only records J_now.
void accumulate_time_integral(FluxProfile& profile, std::span<const double> j_now,
                              double dt);

/// Every `stride`-th interior grid edge plus the extra sizes, sorted and
/// de-duplicated, restricted to the grid range.
std::vector<double> default_probes(const Grid& grid, int stride,
                                   std::span<const double> extra = {});

}  // namespace coagflux
