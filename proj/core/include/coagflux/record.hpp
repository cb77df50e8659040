#pragma once

#include <string>

namespace coagflux {

/// One verification outcome. `pass` is decided by the producing check from
/// `margin` and that check's tolerance.
struct DiagnosticRecord {
  std::string name;
  double time = 0.0;
  double observed = 0.0;
  double bound_or_target = 0.0;
  double margin = 0.0;
  bool pass = true;
  std::string detail;  // e.g. "z=1.2e-3" or "R=0.5"
};

}  // namespace coagflux
