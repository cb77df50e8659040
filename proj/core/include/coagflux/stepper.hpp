#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "coagflux/coag_op.hpp"
#include "coagflux/flux.hpp"
#include "coagflux/grid.hpp"
#include "coagflux/record.hpp"
#include "coagflux/scenario.hpp"
#include "coagflux/state.hpp"

namespace coagflux {

struct DtProposal {
  double dt = 0.0;
  bool hit_floor = false;  // the positivity limit was below dt_min
};

/// dt = clamp(safety * min_i n_i / |loss_i|, dt_min, dt_max) over bins with
/// n_i above the count floor and a negative rate.
DtProposal propose_dt(const State& state, const RhsBreakdown& rhs, const StepControl& control);

struct StepOutcome {
  State next;
  /// Per probe: integral over the step of the ledger flux, weighted with the
  /// method's stage weights so it closes the discrete mass balance exactly.
  std::vector<double> ledger_integrals;
  double clipped = 0.0;  // mass added by clipping negative counts this step
};

/// Explicit integrator for dn/dt = rhs on a fixed grid.
class Integrator {
 public:
  Integrator(const Grid& grid, const KernelSpec& kernel, SourceSpec source,
             TruncationPolicy policy, StepControl control, std::vector<double> probes = {});

  const CoagulationOperator& op() const { return op_; }
  const Grid& grid() const { return op_.grid(); }
  const SourceSpec& source() const { return source_; }
  const StepControl& control() const { return control_; }
  const std::vector<double>& probes() const { return probes_; }

  DtProposal propose(const State& state) const;

  /// One step of size dt. Throws std::runtime_error on non-finite rates.
  StepOutcome advance(const State& state, double dt) const;

 private:
  double stage(std::span<const double> counts, std::span<double> out,
               double& injected_rate) const;

  CoagulationOperator op_;
  SourceSpec source_;
  StepControl control_;
  std::vector<double> probes_;
  std::vector<std::size_t> probe_prefix_;  // pivots at or below each probe
  std::size_t injection_bin_;
};

/// Single step without a persistent integrator.
State step(const State& state, const Grid& grid, const KernelSpec& kernel,
           const SourceSpec& source, TruncationPolicy policy, const StepControl& control,
           double dt);

struct Moments {
  double m0 = 0.0;
  double m1 = 0.0;
  double m_gamma_lambda = 0.0;  // M_{gamma+lambda}
  double m_minus_lambda = 0.0;  // M_{-lambda}
};

Moments summarize(const State& state, const Grid& grid, const KernelSpec& kernel);

struct Sample {
  State state;
  Moments moments;
};

/// Flux readings at one sample time, indexed by probe.
struct FluxSample {
  std::vector<double> j;                 // atomic quadrature flux
  std::vector<double> j_ledger;          // instantaneous scheme flux
  std::vector<std::vector<FluxRegions>> regions;  // [delta][probe]
  std::vector<double> j_integral;        // trapezoid of j at sample cadence
  std::vector<double> ledger_integral;   // exact stage-weighted integral
};

struct RunStats {
  std::size_t steps = 0;
  std::size_t dt_floor_hits = 0;
  double clipped_mass = 0.0;
  double min_dt = 0.0;
  double max_dt = 0.0;
  bool clipping_invalid = false;  // clipped mass above 1e-8 of injected mass

  bool valid() const { return dt_floor_hits == 0 && !clipping_invalid; }
};

struct Trajectory {
  Grid grid;
  KernelSpec kernel;
  SourceSpec source;
  TruncationPolicy policy;
  double horizon;
  std::vector<double> probes;
  std::vector<double> deltas;
  std::vector<Sample> samples;
  std::vector<FluxSample> flux;
  FluxProfile flux_history;
  std::vector<DiagnosticRecord> diagnostics_log;
  RunStats stats;

  double initial_mass() const { return samples.front().moments.m1; }
  /// Index of the sample whose time is closest to t.
  std::size_t nearest_sample(double t) const;
};

/// Resolves the source against the grid (snapping epsilon to its bin pivot
/// when requested).
SourceSpec resolve_source(const ScenarioConfig& config, const Grid& grid);

/// Integrates the scenario from t = 0 to the horizon, sampling every
/// config.sample_interval() in simulation time.
Trajectory run(const ScenarioConfig& config);

}  // namespace coagflux
