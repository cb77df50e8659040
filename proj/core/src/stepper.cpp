#include "coagflux/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace coagflux {

std::string to_string(StepMethod method) {
  switch (method) {
    case StepMethod::euler: return "euler";
    case StepMethod::heun: return "heun";
    case StepMethod::rk4: return "rk4";
  }
  return "?";
}

std::string to_string(TruncationPolicy policy) {
  return policy == TruncationPolicy::truncate_top ? "truncate_top" : "pile_top";
}

void StepControl::validate() const {
  if (!(safety > 0.0 && safety <= 1.0)) {
    throw std::invalid_argument("control: safety must lie in (0, 1]");
  }
  if (!(dt_min > 0.0) || !(dt_min <= dt_max)) {
    throw std::invalid_argument("control: need 0 < dt_min <= dt_max");
  }
  if (sample_every < 0.0) {
    throw std::invalid_argument("control: sample_every must be non-negative");
  }
}

DtProposal propose_dt(const State& state, const RhsBreakdown& rhs,
                      const StepControl& control) {
  double limit = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < state.counts.size(); ++i) {
    const double n = state.counts[i];
    if (!(n > control.count_floor)) continue;
    const double negative = -rhs.loss[i];
    if (negative > 0.0) limit = std::min(limit, n / negative);
  }
  DtProposal proposal;
  const double raw = control.safety * limit;
  proposal.hit_floor = raw < control.dt_min;
  proposal.dt = std::clamp(raw, control.dt_min, control.dt_max);
  return proposal;
}

Integrator::Integrator(const Grid& grid, const KernelSpec& kernel, SourceSpec source,
                       TruncationPolicy policy, StepControl control,
                       std::vector<double> probes)
    : op_(grid, kernel, policy),
      source_(source),
      control_(control),
      probes_(std::move(probes)),
      injection_bin_(op_.injection_bin(source)) {
  control_.validate();
  probe_prefix_.reserve(probes_.size());
  for (double z : probes_) probe_prefix_.push_back(grid.count_pivots_at_or_below(z));
}

DtProposal Integrator::propose(const State& state) const {
  // n_i / |loss_i| = 1 / sum_j K_ij n_j, so only the collision frequency matters.
  const auto& table = op_.kernel_table();
  const std::size_t n = state.counts.size();
  double max_frequency = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(state.counts[i] > control_.count_floor)) continue;
    double frequency = 0.0;
    for (std::size_t j = 0; j < n; ++j) frequency += table(i, j) * state.counts[j];
    max_frequency = std::max(max_frequency, frequency);
  }
  double raw = max_frequency > 0.0 ? control_.safety / max_frequency
                                   : std::numeric_limits<double>::infinity();
  // The source fills the injection bin at rate S within the step, raising its
  // self-collision frequency by about K S dt; keep that below the safety too.
  // Without this the first steps from an empty state overshoot badly.
  const double s_rate = source_.mass_rate / source_.epsilon;
  const double k_pp = table(injection_bin_, injection_bin_);
  if (s_rate > 0.0 && k_pp > 0.0) raw = std::min(raw, std::sqrt(control_.safety / (k_pp * s_rate)));
  DtProposal proposal;
  proposal.hit_floor = raw < control_.dt_min;
  proposal.dt = std::clamp(raw, control_.dt_min, control_.dt_max);
  return proposal;
}

double Integrator::stage(std::span<const double> counts, std::span<double> out,
                         double& injected_rate) const {
  const double leak = op_.assemble_total(counts, source_, out, injected_rate);
  for (double v : out) {
    if (!std::isfinite(v)) throw std::runtime_error("stepper: non-finite rate encountered");
  }
  if (!std::isfinite(leak)) throw std::runtime_error("stepper: non-finite leak rate");
  return leak;
}

StepOutcome Integrator::advance(const State& state, double dt) const {
  if (!(dt > 0.0)) throw std::invalid_argument("stepper: dt must be positive");
  const std::size_t n = state.counts.size();
  const auto pivots = grid().pivots();

  struct Stage {
    double weight;
    std::vector<double> rate;
    double leak = 0.0;
    double injected = 0.0;
  };
  std::vector<Stage> stages;
  stages.reserve(4);  // spans into earlier stages must stay valid
  std::vector<double> probe(n);

  auto evaluate = [&](std::span<const double> counts, double weight) {
    Stage s{weight, std::vector<double>(n), 0.0, 0.0};
    s.leak = stage(counts, s.rate, s.injected);
    stages.push_back(std::move(s));
    return std::span<const double>(stages.back().rate);
  };
  // Stage inputs are clipped at zero; the update below stays exactly
  // conservative whatever the stage inputs are.
  auto offset = [&](std::span<const double> rate, double h) {
    for (std::size_t i = 0; i < n; ++i) {
      probe[i] = std::max(0.0, state.counts[i] + h * rate[i]);
    }
    return std::span<const double>(probe);
  };

  switch (control_.method) {
    case StepMethod::euler:
      evaluate(state.counts, 1.0);
      break;
    case StepMethod::heun: {
      const auto k1 = evaluate(state.counts, 0.5);
      evaluate(offset(k1, dt), 0.5);
      break;
    }
    case StepMethod::rk4: {
      const auto k1 = evaluate(state.counts, 1.0 / 6.0);
      const auto k2 = evaluate(offset(k1, 0.5 * dt), 1.0 / 3.0);
      const auto k3 = evaluate(offset(k2, 0.5 * dt), 1.0 / 3.0);
      evaluate(offset(k3, dt), 1.0 / 6.0);
      break;
    }
  }

  StepOutcome outcome;
  outcome.next = state;
  State& next = outcome.next;
  next.time = state.time + dt;
  std::vector<double> increment(n, 0.0);
  for (const Stage& s : stages) {
    for (std::size_t i = 0; i < n; ++i) increment[i] += s.weight * s.rate[i];
    next.leaked_top_mass += dt * s.weight * s.leak;
    next.injected_mass += dt * s.weight * s.injected;
  }

  // Ledger flux integral over the step: mass leaving {x <= z} through
  // coagulation, i.e. the source-free part of the prefix mass change.
  outcome.ledger_integrals.assign(probes_.size(), 0.0);
  for (std::size_t k = 0; k < probes_.size(); ++k) {
    double prefix = 0.0;
    for (std::size_t i = 0; i < probe_prefix_[k]; ++i) prefix += pivots[i] * increment[i];
    if (injection_bin_ < probe_prefix_[k]) {
      double source_rate = 0.0;
      for (const Stage& s : stages) source_rate += s.weight * s.injected;
      prefix -= source_rate;
    }
    outcome.ledger_integrals[k] = -dt * prefix;
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double value = state.counts[i] + dt * increment[i];
    if (value < 0.0) {
      outcome.clipped += -value * pivots[i];
      next.counts[i] = 0.0;
    } else {
      next.counts[i] = value;
    }
  }
  next.clipped_mass += outcome.clipped;
  return outcome;
}

State step(const State& state, const Grid& grid, const KernelSpec& kernel,
           const SourceSpec& source, TruncationPolicy policy, const StepControl& control,
           double dt) {
  return Integrator(grid, kernel, source, policy, control).advance(state, dt).next;
}

Moments summarize(const State& state, const Grid& grid, const KernelSpec& kernel) {
  Moments m;
  m.m0 = moment(state, grid, 0.0);
  m.m1 = moment(state, grid, 1.0);
  m.m_gamma_lambda = moment(state, grid, kernel.gamma + kernel.lambda);
  m.m_minus_lambda = moment(state, grid, -kernel.lambda);
  return m;
}

std::size_t Trajectory::nearest_sample(double t) const {
  std::size_t best = 0;
  for (std::size_t k = 1; k < samples.size(); ++k) {
    if (std::abs(samples[k].state.time - t) < std::abs(samples[best].state.time - t)) {
      best = k;
    }
  }
  return best;
}

SourceSpec resolve_source(const ScenarioConfig& config, const Grid& grid) {
  SourceSpec source = config.source;
  if (config.snap_epsilon_to_pivot) {
    const auto loc = grid.locate(source.epsilon);
    if (!loc.inside()) {
      throw std::invalid_argument("source: epsilon lies outside the grid");
    }
    source.epsilon = grid.pivot(loc.index);
  }
  return source;
}

namespace {

FluxSample read_fluxes(const Trajectory& traj, const State& state,
                       const CoagulationOperator& op) {
  const auto& table = op.kernel_table();
  FluxSample sample;
  const std::size_t m = traj.probes.size();
  sample.j.resize(m);
  sample.j_ledger.resize(m);
  sample.regions.assign(traj.deltas.size(), std::vector<FluxRegions>(m));
  const RhsBreakdown rhs = op.assemble(state.counts, traj.source);
  for (std::size_t k = 0; k < m; ++k) {
    const double z = traj.probes[k];
    sample.j[k] = quadrature_flux(state, traj.grid, table, z);
    sample.j_ledger[k] = ledger_flux(rhs, traj.grid, z);
    for (std::size_t d = 0; d < traj.deltas.size(); ++d) {
      sample.regions[d][k] = region_split_flux(state, traj.grid, table, z, traj.deltas[d]);
    }
  }
  return sample;
}

}  // namespace

Trajectory run(const ScenarioConfig& config) {
  if (config.horizon < 0.0) throw std::invalid_argument("run: horizon must be >= 0");
  Grid grid = Grid::build_geometric(config.grid.x_min, config.grid.x_max,
                                    config.grid.bins_per_decade);
  const SourceSpec source = resolve_source(config, grid);
  std::vector<double> probes = default_probes(grid, config.probe_stride, config.probes);
  Integrator integrator(grid, config.kernel, source, config.truncation, config.control,
                        probes);

  Trajectory traj{grid,
                  config.kernel,
                  source,
                  config.truncation,
                  config.horizon,
                  probes,
                  config.deltas,
                  {},
                  {},
                  FluxProfile(probes),
                  {},
                  {}};

  State state = project_initial(grid, config.initial, source.epsilon).state;
  std::vector<double> ledger_running(probes.size(), 0.0);

  auto record_sample = [&](const State& s, double dt_since_last) {
    traj.samples.push_back({s, summarize(s, grid, config.kernel)});
    FluxSample fs = read_fluxes(traj, s, integrator.op());
    accumulate_time_integral(traj.flux_history, fs.j, dt_since_last);
    fs.j_integral = traj.flux_history.time_integrated;
    fs.ledger_integral = ledger_running;
    traj.flux.push_back(std::move(fs));
  };
  record_sample(state, 0.0);

  const double interval = config.sample_interval();
  const double horizon = config.horizon;
  double min_dt = std::numeric_limits<double>::infinity();
  double max_dt = 0.0;
  std::size_t sample_index = 1;
  double last_sample_time = 0.0;

  while (horizon > 0.0 && state.time < horizon) {
    const double target = std::min(horizon, static_cast<double>(sample_index) * interval);
    while (state.time < target) {
      const DtProposal proposal = integrator.propose(state);
      if (proposal.hit_floor) ++traj.stats.dt_floor_hits;
      double dt = proposal.dt;
      bool lands = false;
      if (state.time + dt >= target * (1.0 - 1e-13)) {
        dt = target - state.time;
        lands = true;
      }
      if (!(dt > 0.0)) break;
      StepOutcome outcome = integrator.advance(state, dt);
      for (std::size_t k = 0; k < probes.size(); ++k) {
        ledger_running[k] += outcome.ledger_integrals[k];
      }
      traj.stats.clipped_mass += outcome.clipped;
      state = std::move(outcome.next);
      if (lands) state.time = target;
      ++traj.stats.steps;
      min_dt = std::min(min_dt, dt);
      max_dt = std::max(max_dt, dt);
    }
    record_sample(state, state.time - last_sample_time);
    last_sample_time = state.time;
    ++sample_index;
  }

  traj.stats.min_dt = traj.stats.steps > 0 ? min_dt : 0.0;
  traj.stats.max_dt = max_dt;
  traj.stats.clipping_invalid =
      traj.stats.clipped_mass > 1e-8 * std::max(state.injected_mass, 0.0) &&
      traj.stats.clipped_mass > 0.0;
  return traj;
}

}  // namespace coagflux
