#pragma once

#include <cstdint>
#include <string>

namespace coagflux {

/// Coagulation kernel together with the power-law envelope
///   c1 * h(x, y) <= K(x, y) <= c2 * h(x, y),
///   h(x, y) = x^(gamma+lambda) y^(-lambda) + y^(gamma+lambda) x^(-lambda).
///
/// A `power_pair` kernel is evaluated as c_mid * h with c_mid = (c1 + c2) / 2,
/// the canonical member of the envelope for the given exponents.
struct KernelSpec {
  enum class Kind { constant, power_pair };

  Kind kind = Kind::constant;
  double value = 2.0;  // K for the constant kind; unused for power_pair
  double gamma = 0.0;
  double lambda = 0.0;
  double c1 = 1.0;
  double c2 = 1.0;

  /// K == value with gamma = lambda = 0. Bound constants default to value/2,
  /// so that K = c * h with h == 2.
  static KernelSpec constant(double value);
  static KernelSpec constant(double value, double c1, double c2);
  static KernelSpec power_pair(double gamma, double lambda, double c1, double c2);

  double c_mid() const { return 0.5 * (c1 + c2); }

  /// Throws std::invalid_argument unless 0 < c1 <= c2 < inf and the
  /// exponents are finite (and zero for the constant kind).
  void validate() const;
};

std::string to_string(KernelSpec::Kind kind);

/// h(x, y) from the envelope above.
double bound_function(double gamma, double lambda, double x, double y);

/// K(x, y); symmetric to the last bit. Throws on non-positive sizes.
double eval_kernel(const KernelSpec& spec, double x, double y);

struct RegimeClassification {
  bool flux_regime = false;    // |gamma + 2 lambda| < 1 and gamma < 1
  bool source_regime = false;  // gamma + lambda < 1 and -lambda < 1
  bool gelling_suspect = false;  // gamma > 1

  /// Human-readable account of which inequalities failed.
  std::string explain(double gamma, double lambda) const;
};

RegimeClassification classify_exponents(double gamma, double lambda);

struct BoundViolation {
  double worst_relative = 0.0;  // 0 when c1 h <= K <= c2 h everywhere sampled
  double x = 0.0;
  double y = 0.0;
  std::size_t samples = 0;
};

/// Samples log-uniform pairs over [1e-6, 1e6]^2 and reports the largest
/// relative violation of the envelope.
BoundViolation verify_bounds(const KernelSpec& spec, std::size_t sample_count,
                             std::uint64_t seed = 20240601);

/// C' = (1/2) c1 min_{(u,v) in [1/2,1]^2} u h(u,v), found on a 256x256 lattice
/// that is refined once around the coarse minimiser.
double lower_bound_constant(const KernelSpec& spec);

}  // namespace coagflux
