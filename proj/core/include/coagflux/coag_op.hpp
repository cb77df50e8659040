#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "coagflux/grid.hpp"
#include "coagflux/kernel.hpp"
#include "coagflux/state.hpp"

namespace coagflux {

struct SourceSpec {
  double epsilon = 1e-4;
  double mass_rate = 1.0;  // injected as mass_rate / epsilon particles per unit time
};

enum class TruncationPolicy {
  truncate_top,  // products beyond the last pivot are discarded and metered
  pile_top,      // products beyond the last pivot are stacked on it, mass-conservatively
};

/// Symmetric table K(x_i, x_j) over the grid pivots.
class KernelTable {
 public:
  KernelTable(const Grid& grid, const KernelSpec& spec);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }

 private:
  std::size_t n_;
  std::vector<double> values_;
};

struct RhsBreakdown {
  std::vector<double> gain;    // >= 0
  std::vector<double> loss;    // <= 0
  std::vector<double> source;  // >= 0
  double top_mass_leak_rate = 0.0;
  double injected_mass_rate = 0.0;  // pivot mass times number injection rate
  double event_rate = 0.0;            // all coagulation events per unit time
  double truncated_event_rate = 0.0;  // events whose product was discarded

  explicit RhsBreakdown(std::size_t bins = 0)
      : gain(bins, 0.0), loss(bins, 0.0), source(bins, 0.0) {}

  double coagulation(std::size_t i) const { return gain[i] + loss[i]; }
  double total(std::size_t i) const { return gain[i] + loss[i] + source[i]; }
};

/// Right-hand side of the truncated coagulation equation with a point source.
/// The pair geometry (kernel values, product targets, splitting fractions) is
/// computed once per grid; `assemble` is then a single O(N^2) sweep.
///
/// Each unordered pair (i, j) coagulates at rate (1 - delta_ij / 2) K n_i n_j.
/// The product w = x_i + x_j is split between the bracketing pivots
/// x_k <= w < x_{k+1} with number fractions eta = (x_{k+1} - w)/(x_{k+1} - x_k)
/// and 1 - eta, which conserves both number and mass.
class CoagulationOperator {
 public:
  CoagulationOperator(const Grid& grid, const KernelSpec& kernel,
                      TruncationPolicy policy);

  const Grid& grid() const { return grid_; }
  const KernelTable& kernel_table() const { return table_; }
  TruncationPolicy policy() const { return policy_; }

  /// Throws if epsilon falls outside the grid.
  std::size_t injection_bin(const SourceSpec& source) const;

  RhsBreakdown assemble(std::span<const double> counts, const SourceSpec& source) const;

  /// Only the summed rate, written into `out`; returns the top leak rate and
  /// sets `injected_mass_rate`. Used by the stepper's inner stages.
  double assemble_total(std::span<const double> counts, const SourceSpec& source,
                        std::span<double> out, double& injected_mass_rate) const;

 private:
  struct Target {
    std::size_t lower;  // pivot index receiving fraction eta
    double eta;
    bool above_top;  // product beyond the last pivot
    double pile_factor;  // w / x_last when above_top
  };

  const Target& target(std::size_t i, std::size_t j) const {
    return targets_[i * n_ + j];
  }

  Grid grid_;
  KernelTable table_;
  TruncationPolicy policy_;
  std::size_t n_;
  std::vector<Target> targets_;  // upper triangle used
};

/// Convenience wrapper building the operator for one evaluation.
RhsBreakdown assemble_rhs(const State& state, const Grid& grid, const KernelSpec& kernel,
                          const SourceSpec& source, TruncationPolicy policy);

/// Test function for the weak form: values at the pivots plus a total
/// evaluator for product sizes.
struct TestFunction {
  std::vector<double> at_pivots;
  std::function<double(double)> at;

  /// Samples `f` at the pivots and evaluates it exactly elsewhere.
  static TestFunction sampled(const Grid& grid, std::function<double(double)> f);
  /// Piecewise-linear interpolant of the given pivot values (constant
  /// extrapolation outside the pivot range).
  static TestFunction piecewise_linear(const Grid& grid, std::vector<double> values);
};

/// (1/2) sum_{i,j} (phi(x_i + x_j) - phi(x_i) - phi(x_j)) K(x_i, x_j) n_i n_j.
double weak_pairing(const State& state, const Grid& grid, const KernelSpec& kernel,
                    const TestFunction& phi);

}  // namespace coagflux
