#include "coagflux/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace coagflux {

KernelSpec KernelSpec::constant(double value) {
  return constant(value, 0.5 * value, 0.5 * value);
}

KernelSpec KernelSpec::constant(double value, double c1, double c2) {
  KernelSpec spec;
  spec.kind = Kind::constant;
  spec.value = value;
  spec.c1 = c1;
  spec.c2 = c2;
  spec.validate();
  return spec;
}

KernelSpec KernelSpec::power_pair(double gamma, double lambda, double c1,
                                  double c2) {
  KernelSpec spec;
  spec.kind = Kind::power_pair;
  spec.value = 0.0;
  spec.gamma = gamma;
  spec.lambda = lambda;
  spec.c1 = c1;
  spec.c2 = c2;
  spec.validate();
  return spec;
}

void KernelSpec::validate() const {
  if (!(c1 > 0.0) || !(c1 <= c2) || !std::isfinite(c2)) {
    throw std::invalid_argument("kernel: bound constants need 0 < c1 <= c2 < inf");
  }
  if (!std::isfinite(gamma) || !std::isfinite(lambda)) {
    throw std::invalid_argument("kernel: exponents must be finite");
  }
  if (kind == Kind::constant) {
    if (gamma != 0.0 || lambda != 0.0) {
      throw std::invalid_argument("kernel: constant kernel has gamma = lambda = 0");
    }
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw std::invalid_argument("kernel: constant value must be positive");
    }
  }
}

std::string to_string(KernelSpec::Kind kind) {
  return kind == KernelSpec::Kind::constant ? "constant" : "power_pair";
}

double bound_function(double gamma, double lambda, double x, double y) {
  if (gamma == 0.0 && lambda == 0.0) return 2.0;
  const double a = std::pow(x, gamma + lambda) * std::pow(y, -lambda);
  const double b = std::pow(y, gamma + lambda) * std::pow(x, -lambda);
  return a + b;
}

double eval_kernel(const KernelSpec& spec, double x, double y) {
  if (!(x > 0.0) || !(y > 0.0)) {
    throw std::invalid_argument("kernel: sizes must be positive");
  }
  if (spec.kind == KernelSpec::Kind::constant) return spec.value;
  return spec.c_mid() * bound_function(spec.gamma, spec.lambda, x, y);
}

RegimeClassification classify_exponents(double gamma, double lambda) {
  RegimeClassification r;
  r.flux_regime = std::abs(gamma + 2.0 * lambda) < 1.0 && gamma < 1.0;
  r.source_regime = gamma + lambda < 1.0 && -lambda < 1.0;
  r.gelling_suspect = gamma > 1.0;
  return r;
}

std::string RegimeClassification::explain(double gamma, double lambda) const {
  std::ostringstream out;
  out << "gamma=" << gamma << ", lambda=" << lambda << ": ";
  const double mixed = std::abs(gamma + 2.0 * lambda);
  if (flux_regime) {
    out << "flux regime (|gamma+2lambda| = " << mixed << " < 1, gamma < 1)";
    return out.str();
  }
  out << "not in flux regime (";
  if (!(mixed < 1.0)) out << "|gamma+2lambda| = " << mixed << " >= 1";
  if (!(mixed < 1.0) && !(gamma < 1.0)) out << "; ";
  if (!(gamma < 1.0)) out << "gamma = " << gamma << " >= 1";
  out << ")";
  if (source_regime) {
    out << ", source regime holds";
  } else {
    out << ", source regime fails (";
    if (!(gamma + lambda < 1.0)) out << "gamma+lambda = " << gamma + lambda << " >= 1";
    if (!(gamma + lambda < 1.0) && !(-lambda < 1.0)) out << "; ";
    if (!(-lambda < 1.0)) out << "-lambda = " << -lambda << " >= 1";
    out << ")";
  }
  if (gelling_suspect) out << ", gelation suspected (gamma > 1)";
  return out.str();
}

BoundViolation verify_bounds(const KernelSpec& spec, std::size_t sample_count,
                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_size(-6.0, 6.0);
  BoundViolation report;
  report.samples = sample_count;
  for (std::size_t s = 0; s < sample_count; ++s) {
    const double x = std::pow(10.0, log_size(rng));
    const double y = std::pow(10.0, log_size(rng));
    const double k = eval_kernel(spec, x, y);
    const double h = bound_function(spec.gamma, spec.lambda, x, y);
    const double lower = spec.c1 * h;
    const double upper = spec.c2 * h;
    double violation = 0.0;
    if (k < lower) violation = (lower - k) / lower;
    if (k > upper) violation = std::max(violation, (k - upper) / upper);
    if (violation > report.worst_relative) {
      report.worst_relative = violation;
      report.x = x;
      report.y = y;
    }
  }
  return report;
}

namespace {

struct LatticeMin {
  double value;
  double u;
  double v;
};

LatticeMin minimise_on_lattice(double gamma, double lambda, double u_lo,
                               double u_hi, double v_lo, double v_hi) {
  constexpr int kPoints = 256;
  LatticeMin best{std::numeric_limits<double>::infinity(), u_lo, v_lo};
  for (int a = 0; a < kPoints; ++a) {
    const double u = u_lo + (u_hi - u_lo) * a / (kPoints - 1);
    for (int b = 0; b < kPoints; ++b) {
      const double v = v_lo + (v_hi - v_lo) * b / (kPoints - 1);
      const double value = u * bound_function(gamma, lambda, u, v);
      if (value < best.value) best = {value, u, v};
    }
  }
  return best;
}

}  // namespace

double lower_bound_constant(const KernelSpec& spec) {
  const double gamma = spec.gamma;
  const double lambda = spec.lambda;
  const LatticeMin coarse = minimise_on_lattice(gamma, lambda, 0.5, 1.0, 0.5, 1.0);
  const double step = 0.5 / 255.0;
  const LatticeMin fine = minimise_on_lattice(
      gamma, lambda, std::max(0.5, coarse.u - step), std::min(1.0, coarse.u + step),
      std::max(0.5, coarse.v - step), std::min(1.0, coarse.v + step));
  return 0.5 * spec.c1 * std::min(coarse.value, fine.value);
}

}  // namespace coagflux
