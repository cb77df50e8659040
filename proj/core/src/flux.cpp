#include "coagflux/flux.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace coagflux {

double quadrature_flux(const State& state, const Grid& grid, const KernelTable& table,
                       double z) {
  if (!(z > 0.0)) throw std::invalid_argument("flux: probe size must be positive");
  const auto pivots = grid.pivots();
  const std::size_t below = grid.count_pivots_at_or_below(z);
  double total = 0.0;
  for (std::size_t i = 0; i < below; ++i) {
    const double ni = state.counts[i];
    if (ni == 0.0) continue;
    double partner = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      if (pivots[i] + pivots[j] <= z || state.counts[j] == 0.0) continue;
      partner += table(i, j) * state.counts[j];
    }
    total += pivots[i] * ni * partner;
  }
  return total;
}

double quadrature_flux(const State& state, const Grid& grid, const KernelSpec& kernel,
                       double z) {
  return quadrature_flux(state, grid, KernelTable(grid, kernel), z);
}

FluxRegions region_split_flux(const State& state, const Grid& grid,
                              const KernelTable& table, double z, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("flux: region split needs 0 < delta < 1");
  }
  if (!(z > 0.0)) throw std::invalid_argument("flux: probe size must be positive");
  const auto pivots = grid.pivots();
  const std::size_t below = grid.count_pivots_at_or_below(z);
  FluxRegions regions;
  for (std::size_t i = 0; i < below; ++i) {
    const double ni = state.counts[i];
    if (ni == 0.0) continue;
    const double x = pivots[i];
    double r1 = 0.0, r2 = 0.0, r3 = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double y = pivots[j];
      if (x + y <= z || state.counts[j] == 0.0) continue;
      const double term = table(i, j) * state.counts[j];
      if (y >= x / delta) {
        r1 += term;
      } else if (y <= delta * x) {
        r3 += term;
      } else {
        r2 += term;
      }
    }
    regions.j1 += x * ni * r1;
    regions.j2 += x * ni * r2;
    regions.j3 += x * ni * r3;
  }
  return regions;
}

FluxRegions region_split_flux(const State& state, const Grid& grid,
                              const KernelSpec& kernel, double z, double delta) {
  return region_split_flux(state, grid, KernelTable(grid, kernel), z, delta);
}

double ledger_flux(const RhsBreakdown& rhs, const Grid& grid, double z) {
  const std::size_t below = std::min(grid.count_pivots_at_or_below(z), rhs.gain.size());
  double total = 0.0;
  for (std::size_t i = 0; i < below; ++i) total += grid.pivot(i) * rhs.coagulation(i);
  return -total;
}

namespace {

// Per-bin density A x^a reconstructed from the bin counts.
struct BinDensity {
  double amplitude = 0.0;
  double exponent = -1.0;
};

std::vector<BinDensity> reconstruct(const State& state, const Grid& grid) {
  const std::size_t n = grid.size();
  std::vector<BinDensity> bins(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double count = state.counts[j];
    if (count <= 0.0) continue;
    const std::size_t lo = j > 0 ? j - 1 : j;
    const std::size_t hi = j + 1 < n ? j + 1 : j;
    double exponent = -1.0;
    if (lo != hi && state.counts[lo] > 0.0 && state.counts[hi] > 0.0) {
      // Counts per geometric bin scale like x^(a+1).
      exponent = std::log(state.counts[hi] / state.counts[lo]) /
                     std::log(grid.pivot(hi) / grid.pivot(lo)) -
                 1.0;
    }
    const double unit = power_law_integral(1.0, exponent, grid.edge(j), grid.edge(j + 1));
    bins[j] = {count / unit, exponent};
  }
  return bins;
}

// Gauss-Legendre nodes/weights on [-1, 1].
constexpr std::array<double, 8> kGlNodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGlWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066678767393, 0.3626837833783620,
    0.3626837833783620, 0.3137066678767393, 0.2223810344533745, 0.1012285362903763};

}  // namespace

double resolved_flux(const State& state, const Grid& grid, const KernelSpec& kernel,
                     double z, int subcells) {
  if (!(z > 0.0)) throw std::invalid_argument("flux: probe size must be positive");
  if (subcells < 1) throw std::invalid_argument("flux: subcells must be >= 1");
  const auto density = reconstruct(state, grid);
  const std::size_t n = grid.size();
  const bool constant = kernel.kind == KernelSpec::Kind::constant;

  // Mass of the reconstructed density below each edge (constant kernel path).
  std::vector<double> cumulative_mass(n + 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    cumulative_mass[j + 1] =
        cumulative_mass[j] + power_law_integral(density[j].amplitude,
                                                density[j].exponent + 1.0, grid.edge(j),
                                                grid.edge(j + 1));
  }
  auto mass_below = [&](double u) {
    if (u <= grid.lower()) return 0.0;
    if (u >= grid.upper()) return cumulative_mass[n];
    const auto loc = grid.locate(u);
    const auto& d = density[loc.index];
    return cumulative_mass[loc.index] +
           power_law_integral(d.amplitude, d.exponent + 1.0, grid.edge(loc.index), u);
  };

  // int_{lo}^{hi} x K(x, y) g(x) dx for the general kernel.
  auto weighted_mass = [&](double lo, double hi, double y) {
    double total = 0.0;
    lo = std::max(lo, grid.lower());
    hi = std::min(hi, grid.upper());
    if (!(hi > lo)) return 0.0;
    std::size_t j = grid.locate(lo).index;
    for (; j < n && grid.edge(j) < hi; ++j) {
      const double a = std::max(lo, grid.edge(j));
      const double b = std::min(hi, grid.edge(j + 1));
      if (!(b > a) || density[j].amplitude == 0.0) continue;
      const double la = std::log(a), lb = std::log(b);
      const double half = 0.5 * (lb - la), mid = 0.5 * (lb + la);
      for (std::size_t q = 0; q < kGlNodes.size(); ++q) {
        const double x = std::exp(mid + half * kGlNodes[q]);
        const double g = density[j].amplitude * std::pow(x, density[j].exponent);
        // dx = x d(log x)
        total += kGlWeights[q] * half * x * x * eval_kernel(kernel, x, y) * g;
      }
    }
    return total;
  };

  double flux = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const auto& d = density[j];
    if (d.amplitude == 0.0) continue;
    const double step = std::pow(grid.ratio(), 1.0 / subcells);
    double lo = grid.edge(j);
    for (int m = 0; m < subcells; ++m) {
      const double hi = m + 1 == subcells ? grid.edge(j + 1) : lo * step;
      const double y = std::sqrt(lo * hi);
      const double count = power_law_integral(d.amplitude, d.exponent, lo, hi);
      const double x_lo = std::max(z - y, 0.0);
      if (constant) {
        flux += kernel.value * count * (mass_below(z) - mass_below(x_lo));
      } else {
        flux += count * weighted_mass(x_lo, z, y);
      }
      lo = hi;
    }
  }
  return flux;
}

FluxProfile::FluxProfile(std::vector<double> probe_sizes)
    : probes(std::move(probe_sizes)),
      j_values(probes.size(), 0.0),
      time_integrated(probes.size(), 0.0) {}

void accumulate_time_integral(FluxProfile& profile, std::span<const double> j_now,
                              double dt) {
  if (j_now.size() != profile.probes.size()) {
    throw std::invalid_argument("flux: one value per probe required");
  }
  if (profile.started) {
    if (!(dt > 0.0)) throw std::invalid_argument("flux: dt must be positive");
    for (std::size_t k = 0; k < j_now.size(); ++k) {
      profile.time_integrated[k] += 0.5 * dt * (profile.j_values[k] + j_now[k]);
    }
  }
  std::copy(j_now.begin(), j_now.end(), profile.j_values.begin());
  profile.started = true;
}

std::vector<double> default_probes(const Grid& grid, int stride,
                                   std::span<const double> extra) {
  std::vector<double> probes;
  if (stride > 0) {
    for (std::size_t i = static_cast<std::size_t>(stride); i < grid.size();
         i += static_cast<std::size_t>(stride)) {
      probes.push_back(grid.edge(i));
    }
  }
  for (double z : extra) {
    if (z > grid.lower() && z < grid.upper()) probes.push_back(z);
  }
  std::sort(probes.begin(), probes.end());
  probes.erase(std::unique(probes.begin(), probes.end()), probes.end());
  return probes;
}

}  // namespace coagflux
