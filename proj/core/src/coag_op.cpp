#include "coagflux/coag_op.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coagflux {

KernelTable::KernelTable(const Grid& grid, const KernelSpec& spec)
    : n_(grid.size()), values_(n_ * n_) {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i; j < n_; ++j) {
      const double k = eval_kernel(spec, grid.pivot(i), grid.pivot(j));
      values_[i * n_ + j] = k;
      values_[j * n_ + i] = k;
    }
  }
}

CoagulationOperator::CoagulationOperator(const Grid& grid, const KernelSpec& kernel,
                                         TruncationPolicy policy)
    : grid_(grid), table_(grid, kernel), policy_(policy), n_(grid.size()),
      targets_(n_ * n_) {
  const auto pivots = grid_.pivots();
  const double last = pivots.back();
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i; j < n_; ++j) {
      const double w = pivots[i] + pivots[j];
      Target& t = targets_[i * n_ + j];
      if (w > last) {
        t = {n_ - 1, 1.0, true, w / last};
        continue;
      }
      // Largest k with pivots[k] <= w; w > pivots[j] so k >= j.
      const auto it = std::upper_bound(pivots.begin() + static_cast<std::ptrdiff_t>(j),
                                       pivots.end(), w);
      const auto k = static_cast<std::size_t>(it - pivots.begin()) - 1;
      if (k + 1 == n_) {
        t = {k, 1.0, false, 1.0};  // w == last pivot exactly
      } else {
        const double eta = (pivots[k + 1] - w) / (pivots[k + 1] - pivots[k]);
        t = {k, eta, false, 1.0};
      }
    }
  }
}

std::size_t CoagulationOperator::injection_bin(const SourceSpec& source) const {
  if (!(source.epsilon > 0.0)) {
    throw std::invalid_argument("source: epsilon must be positive");
  }
  const auto loc = grid_.locate(source.epsilon);
  if (!loc.inside()) {
    throw std::invalid_argument("source: injection size lies outside the grid");
  }
  return loc.index;
}

RhsBreakdown CoagulationOperator::assemble(std::span<const double> counts,
                                           const SourceSpec& source) const {
  RhsBreakdown rhs(n_);
  const auto pivots = grid_.pivots();
  for (std::size_t i = 0; i < n_; ++i) {
    const double ni = counts[i];
    if (ni == 0.0) continue;
    for (std::size_t j = i; j < n_; ++j) {
      const double nj = counts[j];
      if (nj == 0.0) continue;
      double rate = table_(i, j) * ni * nj;
      if (i == j) rate *= 0.5;
      rhs.event_rate += rate;
      rhs.loss[i] -= rate;
      rhs.loss[j] -= rate;
      const Target& t = target(i, j);
      if (t.above_top) {
        if (policy_ == TruncationPolicy::truncate_top) {
          rhs.top_mass_leak_rate += rate * (pivots[i] + pivots[j]);
          rhs.truncated_event_rate += rate;
        } else {
          rhs.gain[n_ - 1] += rate * t.pile_factor;
        }
        continue;
      }
      rhs.gain[t.lower] += rate * t.eta;
      if (t.eta < 1.0) rhs.gain[t.lower + 1] += rate * (1.0 - t.eta);
    }
  }
  const std::size_t p = injection_bin(source);
  const double number_rate = source.mass_rate / source.epsilon;
  rhs.source[p] = number_rate;
  rhs.injected_mass_rate = pivots[p] * number_rate;
  return rhs;
}

double CoagulationOperator::assemble_total(std::span<const double> counts,
                                           const SourceSpec& source, std::span<double> out,
                                           double& injected_mass_rate) const {
  std::fill(out.begin(), out.end(), 0.0);
  const auto pivots = grid_.pivots();
  double leak = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const double ni = counts[i];
    if (ni == 0.0) continue;
    for (std::size_t j = i; j < n_; ++j) {
      const double nj = counts[j];
      if (nj == 0.0) continue;
      double rate = table_(i, j) * ni * nj;
      if (i == j) rate *= 0.5;
      out[i] -= rate;
      out[j] -= rate;
      const Target& t = target(i, j);
      if (t.above_top) {
        if (policy_ == TruncationPolicy::truncate_top) {
          leak += rate * (pivots[i] + pivots[j]);
        } else {
          out[n_ - 1] += rate * t.pile_factor;
        }
        continue;
      }
      out[t.lower] += rate * t.eta;
      if (t.eta < 1.0) out[t.lower + 1] += rate * (1.0 - t.eta);
    }
  }
  const std::size_t p = injection_bin(source);
  const double number_rate = source.mass_rate / source.epsilon;
  out[p] += number_rate;
  injected_mass_rate = pivots[p] * number_rate;
  return leak;
}

RhsBreakdown assemble_rhs(const State& state, const Grid& grid, const KernelSpec& kernel,
                          const SourceSpec& source, TruncationPolicy policy) {
  if (state.counts.size() != grid.size()) {
    throw std::invalid_argument("rhs: state and grid sizes differ");
  }
  for (double n : state.counts) {
    if (n < 0.0) throw std::invalid_argument("rhs: counts must be non-negative");
  }
  return CoagulationOperator(grid, kernel, policy).assemble(state.counts, source);
}

TestFunction TestFunction::sampled(const Grid& grid, std::function<double(double)> f) {
  TestFunction phi;
  phi.at_pivots.reserve(grid.size());
  for (double x : grid.pivots()) phi.at_pivots.push_back(f(x));
  phi.at = std::move(f);
  return phi;
}

TestFunction TestFunction::piecewise_linear(const Grid& grid, std::vector<double> values) {
  if (values.size() != grid.size()) {
    throw std::invalid_argument("test function: one value per pivot required");
  }
  TestFunction phi;
  phi.at_pivots = values;
  std::vector<double> pivots(grid.pivots().begin(), grid.pivots().end());
  phi.at = [pivots = std::move(pivots), values = std::move(values)](double w) {
    if (w <= pivots.front()) return values.front();
    if (w >= pivots.back()) return values.back();
    const auto it = std::upper_bound(pivots.begin(), pivots.end(), w);
    const auto k = static_cast<std::size_t>(it - pivots.begin()) - 1;
    const double eta = (pivots[k + 1] - w) / (pivots[k + 1] - pivots[k]);
    return eta * values[k] + (1.0 - eta) * values[k + 1];
  };
  return phi;
}

double weak_pairing(const State& state, const Grid& grid, const KernelSpec& kernel,
                    const TestFunction& phi) {
  const auto pivots = grid.pivots();
  double total = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (state.counts[i] == 0.0) continue;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      if (state.counts[j] == 0.0) continue;
      const double d = phi.at(pivots[i] + pivots[j]) - phi.at_pivots[i] - phi.at_pivots[j];
      total += d * eval_kernel(kernel, pivots[i], pivots[j]) * state.counts[i] *
               state.counts[j];
    }
  }
  return 0.5 * total;
}

}  // namespace coagflux
