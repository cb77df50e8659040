#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coagflux/coag_op.hpp"
#include "coagflux/kernel.hpp"
#include "coagflux/state.hpp"

namespace coagflux {

enum class StepMethod { euler, heun, rk4 };

std::string to_string(StepMethod method);
std::string to_string(TruncationPolicy policy);

struct StepControl {
  StepMethod method = StepMethod::rk4;
  double safety = 0.2;
  double dt_max = 0.05;
  double dt_min = 1e-12;
  double sample_every = 0.0;  // 0: horizon / 200
  double count_floor = 0.0;   // bins at or below this are ignored by propose_dt

  void validate() const;
};

struct GridSpec {
  double x_min = 1e-4;
  double x_max = 1e6;
  int bins_per_decade = 8;
};

/// Everything a run needs, as loaded from a configuration file.
struct ScenarioConfig {
  KernelSpec kernel = KernelSpec::constant(2.0);
  GridSpec grid;
  SourceSpec source;
  bool snap_epsilon_to_pivot = false;
  InitialData initial = initial::Zero{};
  double horizon = 1.0;
  StepControl control;
  TruncationPolicy truncation = TruncationPolicy::truncate_top;

  int probe_stride = 4;
  std::vector<double> probes;  // extra probe sizes
  std::vector<double> deltas = {0.2, 0.1, 0.05, 0.025};

  std::string output_directory = "out";
  std::vector<std::string> formats = {"csv", "json"};
  int spectrum_stride = 1;  // write spectrum_<k>.csv for every k-th sample
  std::uint64_t seed = 1;

  double sample_interval() const {
    return control.sample_every > 0.0 ? control.sample_every : horizon / 200.0;
  }
};

}  // namespace coagflux
