#include "coagflux/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "coagflux/kernel.hpp"
#include "coagflux/oracle.hpp"

namespace coagflux::diagnostics {

namespace {

std::vector<double> cumulative_trapezoid(const Trajectory& traj,
                                         const std::vector<double>& values) {
  std::vector<double> out(values.size(), 0.0);
  for (std::size_t k = 1; k < values.size(); ++k) {
    const double dt = traj.samples[k].state.time - traj.samples[k - 1].state.time;
    out[k] = out[k - 1] + 0.5 * dt * (values[k] + values[k - 1]);
  }
  return out;
}

double relative(double diff, double scale) {
  return scale > 0.0 ? std::abs(diff) / scale : std::abs(diff);
}

std::string at_size(const char* label, double value) {
  return fmt::format("{}={:.6g}", label, value);
}

}  // namespace

std::vector<DiagnosticRecord> mass_budget_check(const Trajectory& traj,
                                                const SourceSpec& source) {
  if (traj.samples.empty()) throw std::invalid_argument("diagnostics: empty trajectory");
  std::vector<DiagnosticRecord> records;
  const double m1_initial = traj.initial_mass();
  for (const Sample& s : traj.samples) {
    const double t = s.state.time;
    const double budget_lhs =
        s.moments.m1 + s.state.leaked_top_mass - s.state.clipped_mass;
    const double budget_rhs = m1_initial + s.state.injected_mass;
    const double budget_scale = m1_initial + s.state.injected_mass;
    DiagnosticRecord budget{"mass_budget", t, budget_lhs, budget_rhs,
                            relative(budget_lhs - budget_rhs, budget_scale), false, ""};
    budget.pass = budget.margin <= 1e-8;
    records.push_back(budget);

    const double growth_lhs = s.moments.m1 + s.state.leaked_top_mass;
    const double growth_rhs = m1_initial + t * source.mass_rate;
    DiagnosticRecord growth{"mass_growth", t, growth_lhs, growth_rhs,
                            relative(growth_lhs - growth_rhs, growth_rhs), false,
                            at_size("leaked", s.state.leaked_top_mass)};
    growth.pass = growth.margin <= 1e-3;
    records.push_back(growth);
  }
  return records;
}

std::vector<DiagnosticRecord> boundary_flux_check(const Trajectory& traj,
                                                  std::span<const double> z_sequence) {
  std::vector<DiagnosticRecord> records;
  const double eps = traj.source.epsilon;
  const double rate = traj.source.mass_rate;
  // The ratio only has to grow on source-driven runs from zero data.
  const bool from_zero = traj.initial_mass() == 0.0;
  double limit_z = -1.0;
  for (double z : z_sequence) {
    if (z >= eps && z <= 4.0 * eps && (limit_z < 0.0 || z < limit_z)) limit_z = z;
  }
  for (double z : z_sequence) {
    const auto it = std::find(traj.probes.begin(), traj.probes.end(), z);
    if (it == traj.probes.end()) {
      throw std::invalid_argument("diagnostics: boundary z is not a probe");
    }
    const auto k = static_cast<std::size_t>(it - traj.probes.begin());
    double previous = 0.0;
    for (std::size_t s = 1; s < traj.samples.size(); ++s) {
      const double t = traj.samples[s].state.time;
      // The scheme-exact transport across z. The atomic pivot sum counts a
      // product above z in full even when the split puts part of it below z,
      // and overshoots t * rate near the source.
      const double ratio = rate > 0.0 ? traj.flux[s].ledger_integral[k] / (t * rate) : 0.0;
      DiagnosticRecord r{"boundary_flux_ratio", t, ratio, previous, ratio - previous,
                         false, at_size("z", z)};
      r.pass = !from_zero || ratio >= previous - 1e-9;
      records.push_back(r);
      previous = ratio;
      if (z == limit_z && t >= 1.0) {
        DiagnosticRecord lim{"boundary_flux_limit", t, ratio, 1.0, 1.0 - ratio,
                             ratio >= 0.9 && ratio <= 1.0, at_size("z", z)};
        records.push_back(lim);
      }
    }
  }
  return records;
}

double dyadic_constant(double horizon, double initial_mass, double c_prime) {
  return std::sqrt((horizon + initial_mass) / c_prime);
}

double near_zero_constant(double horizon, double initial_mass, double c_prime,
                          double gamma) {
  const double series = 1.0 / (1.0 - std::pow(2.0, -0.5 * (1.0 - gamma)));
  return std::sqrt(horizon) * series * dyadic_constant(horizon, initial_mass, c_prime);
}

std::vector<DiagnosticRecord> dyadic_bound_check(const Trajectory& traj, double gamma,
                                                 double c_prime,
                                                 std::span<const double> r_set) {
  std::vector<DiagnosticRecord> records;
  const double m1_initial = traj.initial_mass();
  const double c_t = dyadic_constant(traj.horizon, m1_initial, c_prime);
  for (double R : r_set) {
    std::vector<double> average(traj.samples.size());
    std::vector<double> squared(traj.samples.size());
    for (std::size_t s = 0; s < traj.samples.size(); ++s) {
      average[s] = dyadic_average(traj.samples[s].state, traj.grid, R, gamma);
      squared[s] = average[s] * average[s];
    }
    const auto first = cumulative_trapezoid(traj, average);
    const auto second = cumulative_trapezoid(traj, squared);
    for (std::size_t s = 0; s < traj.samples.size(); ++s) {
      const double t = traj.samples[s].state.time;
      DiagnosticRecord a{"dyadic_average_integral", t, first[s], c_t, first[s] / c_t,
                         first[s] <= c_t, at_size("R", R)};
      const double bound = (t + m1_initial) / c_prime;
      DiagnosticRecord b{"dyadic_average_squared", t, second[s], bound,
                         bound > 0.0 ? second[s] / bound : 0.0, second[s] <= bound,
                         at_size("R", R)};
      records.push_back(a);
      records.push_back(b);
    }
  }
  return records;
}

std::vector<DiagnosticRecord> near_zero_mass_check(const Trajectory& traj, double gamma,
                                                   double c_prime,
                                                   std::span<const double> x0_set) {
  std::vector<DiagnosticRecord> records;
  const double c_bar = near_zero_constant(traj.horizon, traj.initial_mass(), c_prime, gamma);
  for (double x0 : x0_set) {
    std::vector<double> mass(traj.samples.size());
    for (std::size_t s = 0; s < traj.samples.size(); ++s) {
      mass[s] = mass_at_or_below(traj.samples[s].state, traj.grid, x0);
    }
    const auto integral = cumulative_trapezoid(traj, mass);
    const double bound = c_bar * std::pow(x0, 0.5 * (1.0 - gamma));
    for (std::size_t s = 0; s < traj.samples.size(); ++s) {
      records.push_back({"near_zero_mass", traj.samples[s].state.time, integral[s], bound,
                         integral[s] / bound, integral[s] <= bound, at_size("x0", x0)});
    }
  }
  return records;
}

std::vector<DiagnosticRecord> flux_partition_check(const Trajectory& traj) {
  std::vector<DiagnosticRecord> records;
  for (std::size_t s = 0; s < traj.samples.size(); ++s) {
    const FluxSample& fs = traj.flux[s];
    double worst = 0.0;
    double worst_z = 0.0;
    for (std::size_t d = 0; d < traj.deltas.size(); ++d) {
      for (std::size_t k = 0; k < traj.probes.size(); ++k) {
        const double margin = relative(fs.regions[d][k].total() - fs.j[k], fs.j[k]);
        if (margin > worst) {
          worst = margin;
          worst_z = traj.probes[k];
        }
      }
    }
    records.push_back({"flux_partition", traj.samples[s].state.time, worst, 1e-12, worst,
                       worst <= 1e-12, at_size("z", worst_z)});
  }
  return records;
}

std::vector<DiagnosticRecord> region_monotonicity_check(const Trajectory& traj) {
  std::vector<DiagnosticRecord> records;
  const std::size_t m = traj.probes.size();
  const std::size_t nd = traj.deltas.size();
  const double t_end = traj.samples.back().state.time;
  // Deltas visited from largest to smallest.
  std::vector<std::size_t> order(nd);
  for (std::size_t d = 0; d < nd; ++d) order[d] = d;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return traj.deltas[a] > traj.deltas[b]; });

  // integrated[d][k] for region 1 and region 3.
  std::vector<std::vector<double>> j1(nd, std::vector<double>(m));
  std::vector<std::vector<double>> j3(nd, std::vector<double>(m));
  for (std::size_t d = 0; d < nd; ++d) {
    for (std::size_t k = 0; k < m; ++k) {
      std::vector<double> v1(traj.samples.size()), v3(traj.samples.size());
      for (std::size_t s = 0; s < traj.samples.size(); ++s) {
        v1[s] = traj.flux[s].regions[d][k].j1;
        v3[s] = traj.flux[s].regions[d][k].j3;
      }
      j1[d][k] = cumulative_trapezoid(traj, v1).back();
      j3[d][k] = cumulative_trapezoid(traj, v3).back();
    }
  }
  auto dyadic_mean = [&](const std::vector<double>& values, double R) {
    double total = 0.0;
    int count = 0;
    for (std::size_t k = 0; k < m; ++k) {
      const double z = traj.probes[k];
      if (z >= 0.5 * R * (1.0 - 1e-12) && z <= R * (1.0 + 1e-12)) {
        total += values[k];
        ++count;
      }
    }
    return count > 0 ? total / count : 0.0;
  };
  for (std::size_t step = 1; step < nd; ++step) {
    const std::size_t wide = order[step - 1];
    const std::size_t narrow = order[step];
    for (std::size_t k = 0; k < m; ++k) {
      const double z = traj.probes[k];
      const std::string detail =
          fmt::format("z={:.6g} delta={:.4g}->{:.4g}", z, traj.deltas[wide],
                      traj.deltas[narrow]);
      records.push_back({"region_j1_monotone", t_end, j1[narrow][k], j1[wide][k],
                         j1[narrow][k] - j1[wide][k], j1[narrow][k] <= j1[wide][k], detail});
      const double a3_narrow = dyadic_mean(j3[narrow], z);
      const double a3_wide = dyadic_mean(j3[wide], z);
      records.push_back({"region_j3_monotone", t_end, a3_narrow, a3_wide,
                         a3_narrow - a3_wide, a3_narrow <= a3_wide, detail});
    }
  }
  return records;
}

std::vector<DiagnosticRecord> continuity_check(const Trajectory& traj) {
  std::vector<DiagnosticRecord> records;
  const double eps = traj.source.epsilon;
  const double rate = traj.source.mass_rate;
  for (std::size_t k = 0; k < traj.probes.size(); ++k) {
    const double z = traj.probes[k];
    const double source_on = eps <= z ? rate : 0.0;
    double worst = 0.0;
    double worst_t = 0.0;
    double worst_residual = 0.0;
    double worst_scale = 1.0;
    for (std::size_t s = 1; s < traj.samples.size(); ++s) {
      const State& now = traj.samples[s].state;
      const State& before = traj.samples[s - 1].state;
      const double dm = mass_at_or_below(now, traj.grid, z) -
                        mass_at_or_below(before, traj.grid, z);
      const double dflux = traj.flux[s].ledger_integral[k] - traj.flux[s - 1].ledger_integral[k];
      const double residual = dm + dflux - source_on * (now.time - before.time);
      const double scale = std::max(traj.samples[s].moments.m1, now.time);
      const double margin = relative(residual, scale);
      if (margin >= worst) {
        worst = margin;
        worst_t = now.time;
        worst_residual = residual;
        worst_scale = scale;
      }
    }
    records.push_back({"continuity_identity", worst_t, std::abs(worst_residual),
                       1e-8 * worst_scale, worst, worst <= 1e-8, at_size("z", z)});
  }
  return records;
}

std::vector<DiagnosticRecord> positivity_check(const Trajectory& traj) {
  double most_negative = 0.0;
  for (const Sample& s : traj.samples) {
    for (double n : s.state.counts) most_negative = std::min(most_negative, n);
  }
  return {{"positivity", traj.samples.back().state.time, most_negative, 0.0,
           -most_negative, most_negative >= 0.0, ""}};
}

StationaryDistance stationary_distance(const State& state, const Grid& grid, double gamma,
                                       double prefactor, const StationaryWindow& window,
                                       std::span<const double> lambdas) {
  StationaryDistance out;
  const double exponent = -0.5 * (gamma + 3.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.pivot(i);
    if (x < window.x_lo || x > window.x_hi) continue;
    if (static_cast<std::ptrdiff_t>(i) == window.exclude_bin) continue;
    const double target =
        power_law_integral(prefactor, exponent, grid.edge(i), grid.edge(i + 1));
    const double deviation = std::abs(state.counts[i] - target) / target;
    ++out.bins_compared;
    if (deviation > out.density) {
      out.density = deviation;
      out.worst_size = x;
    }
  }
  for (double lambda : lambdas) {
    const double numeric = oracle::bernstein_of_state(state, grid, lambda);
    const double exact = oracle::analytic_flux_bernstein(state.time, lambda);
    out.bernstein = std::max(out.bernstein, std::abs(numeric - exact) / std::sqrt(lambda));
  }
  return out;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double step = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) out[k] = lo * std::exp(step * static_cast<double>(k));
  out.back() = hi;
  return out;
}

std::vector<double> dyadic_sizes(double lo, double hi) {
  std::vector<double> out;
  for (int e = static_cast<int>(std::ceil(std::log2(lo)));
       std::ldexp(1.0, e) <= hi; ++e) {
    out.push_back(std::ldexp(1.0, e));
  }
  return out;
}

bool VerificationReport::all_pass() const {
  return std::all_of(records.begin(), records.end(),
                     [](const DiagnosticRecord& r) { return r.pass; });
}

std::size_t VerificationReport::failures() const {
  return static_cast<std::size_t>(std::count_if(
      records.begin(), records.end(), [](const DiagnosticRecord& r) { return !r.pass; }));
}

VerificationReport verify(const Trajectory& traj) {
  VerificationReport report;
  auto append = [&](std::vector<DiagnosticRecord> more) {
    report.records.insert(report.records.end(), std::make_move_iterator(more.begin()),
                          std::make_move_iterator(more.end()));
  };
  const double c_prime = lower_bound_constant(traj.kernel);
  const auto sizes = dyadic_sizes(traj.grid.lower(), traj.grid.upper());
  append(mass_budget_check(traj, traj.source));
  append(positivity_check(traj));
  append(boundary_flux_check(traj, traj.probes));
  append(dyadic_bound_check(traj, traj.kernel.gamma, c_prime, sizes));
  append(near_zero_mass_check(traj, traj.kernel.gamma, c_prime, sizes));
  append(flux_partition_check(traj));
  if (traj.deltas.size() > 1) append(region_monotonicity_check(traj));
  append(continuity_check(traj));
  DiagnosticRecord validity{"run_validity", traj.samples.back().state.time,
                            traj.stats.clipped_mass,
                            1e-8 * traj.samples.back().state.injected_mass,
                            static_cast<double>(traj.stats.dt_floor_hits),
                            traj.stats.valid(), ""};
  report.records.push_back(validity);
  return report;
}

}  // namespace coagflux::diagnostics
