#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace coagflux {

/// Geometric size mesh. Bin i is the half-open interval [edges[i], edges[i+1])
/// and carries its particles at the pivot sqrt(edges[i] * edges[i+1]).
class Grid {
 public:
  /// N = ceil(bins_per_decade * log10(x_max / x_min)) bins starting at x_min.
  static Grid build_geometric(double x_min, double x_max, int bins_per_decade);

  /// `bins` bins with first edge `first_edge` and edge ratio `ratio`.
  static Grid from_ratio(double first_edge, double ratio, std::size_t bins);

  std::size_t size() const { return pivots_.size(); }
  double ratio() const { return ratio_; }

  std::span<const double> edges() const { return edges_; }
  std::span<const double> pivots() const { return pivots_; }
  double edge(std::size_t i) const { return edges_[i]; }
  double pivot(std::size_t i) const { return pivots_[i]; }
  double lower() const { return edges_.front(); }
  double upper() const { return edges_.back(); }

  struct Location {
    enum class Where { below, inside, above };
    Where where;
    std::size_t index;  // meaningful only when where == inside

    bool inside() const { return where == Where::inside; }
  };

  /// Bin containing x under the half-open convention. Throws on x <= 0.
  Location locate(double x) const;

  /// Contiguous bin range [begin, end).
  struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    bool empty() const { return begin >= end; }
    std::size_t size() const { return empty() ? 0 : end - begin; }
  };

  /// Bins whose pivots lie in [R/2, R]. Membership is tested with a relative
  /// slack of 1e-12 so pivots that equal R/2 or R up to rounding are kept.
  IndexRange dyadic_window(double R) const;

  /// Bins whose pivots satisfy pivot <= z (a prefix of the grid).
  std::size_t count_pivots_at_or_below(double z) const;

 private:
  Grid(std::vector<double> edges, double ratio);

  std::vector<double> edges_;
  std::vector<double> pivots_;
  double ratio_;
  double log_ratio_;
};

}  // namespace coagflux
