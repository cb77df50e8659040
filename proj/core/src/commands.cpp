#include "coagflux/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "coagflux/config.hpp"
#include "coagflux/diagnostics.hpp"
#include "coagflux/oracle.hpp"
#include "coagflux/output.hpp"
#include "coagflux/stepper.hpp"

namespace coagflux {

namespace fs = std::filesystem;

int cmd_run(const ScenarioConfig& config, const fs::path& out) {
  const Trajectory traj = run(config);
  output::write_trajectory(traj, config, out);
  return 0;
}

int cmd_verify(const ScenarioConfig& config, const fs::path& out, std::ostream& log) {
  const Trajectory traj = run(config);
  output::write_trajectory(traj, config, out);
  const auto report = diagnostics::verify(traj);
  output::write_records(report.records, out / "verify.json");
  const std::size_t failures = report.failures();
  log << fmt::format("{} records, {} failed\n", report.records.size(), failures);
  // Summarise by check name so a failing run says where to look.
  std::vector<std::string> names;
  for (const auto& r : report.records) {
    if (!r.pass && std::find(names.begin(), names.end(), r.name) == names.end()) {
      names.push_back(r.name);
    }
  }
  for (const auto& name : names) {
    std::size_t count = 0;
    const DiagnosticRecord* first = nullptr;
    for (const auto& r : report.records) {
      if (r.name == name && !r.pass) {
        if (!first) first = &r;
        ++count;
      }
    }
    log << fmt::format("  FAIL {} x{} (first at t={:.6g}: observed {:.6g}, bound {:.6g} {})\n",
                       name, count, first->time, first->observed, first->bound_or_target,
                       first->detail);
  }
  return failures == 0 ? 0 : 1;
}

OracleComparison oracle_compare(const ScenarioConfig& config) {
  if (config.kernel.kind != KernelSpec::Kind::constant || config.kernel.value != 2.0) {
    throw std::invalid_argument(
        "oracle-compare: closed forms exist only for the constant kernel K = 2");
  }
  if (!std::holds_alternative<initial::Zero>(config.initial) ||
      config.source.mass_rate != 1.0) {
    throw std::invalid_argument(
        "oracle-compare: closed forms assume zero initial data and mass_rate = 1");
  }
  const Trajectory traj = run(config);
  OracleComparison result;
  const auto lambdas = diagnostics::log_spaced(0.1, 10.0, 9);
  for (const Sample& s : traj.samples) {
    if (s.state.time <= 0.0) continue;
    double worst = 0.0;
    for (double l : lambdas) {
      const double exact = oracle::analytic_eps_bernstein(s.state.time, l, traj.source.epsilon);
      const double numeric = oracle::bernstein_of_state(s.state, traj.grid, l);
      worst = std::max(worst, std::abs(numeric - exact) / exact);
    }
    result.worst_transform = std::max(result.worst_transform, worst);
    result.records.push_back({"transform_distance", s.state.time, worst, 2e-2, 2e-2 - worst,
                              worst <= 2e-2, "lambda in [0.1, 10]"});
  }

  const Sample& last = traj.samples.back();
  const double prefactor = oracle::confirm_stationary_prefactor();
  diagnostics::StationaryWindow window;
  window.x_lo = 10.0 * traj.source.epsilon;
  window.x_hi = 1e-2 * traj.grid.upper();
  window.exclude_bin = static_cast<std::ptrdiff_t>(traj.grid.locate(traj.source.epsilon).index);
  const auto stationary_lambdas = diagnostics::log_spaced(1.0, 100.0, 21);
  const auto distance = diagnostics::stationary_distance(last.state, traj.grid, 0.0, prefactor,
                                                         window, stationary_lambdas);
  result.final_density = distance.density;
  result.records.push_back({"stationary_density", last.state.time, distance.density, 0.1,
                            0.1 - distance.density, distance.density <= 0.1,
                            fmt::format("worst at x={:.6g}", distance.worst_size)});
  result.records.push_back({"stationary_transform", last.state.time, distance.bernstein, 5e-2,
                            5e-2 - distance.bernstein, distance.bernstein <= 5e-2,
                            "lambda in [1, 100]"});
  return result;
}

int cmd_oracle_compare(const ScenarioConfig& config, const fs::path& out, std::ostream& log) {
  const OracleComparison cmp = oracle_compare(config);
  fs::create_directories(out);
  output::write_records(cmp.records, out / "oracle.json");
  log << fmt::format("worst transform distance {:.6g}, final density distance {:.6g}\n",
                     cmp.worst_transform, cmp.final_density);
  // A report, not a gate: the stationary records only make sense for long
  // horizons, so their flags are left to the reader.
  return 0;
}

SweepAxis parse_sweep_axis(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw std::invalid_argument("sweep: expected section.key=v1,v2,..., got '" + text + "'");
  }
  SweepAxis axis;
  axis.key = text.substr(0, eq);
  std::stringstream values(text.substr(eq + 1));
  for (std::string v; std::getline(values, v, ',');) {
    if (!v.empty()) axis.values.push_back(v);
  }
  if (axis.values.empty()) throw std::invalid_argument("sweep: no values for " + axis.key);
  return axis;
}

std::vector<std::vector<std::pair<std::string, std::string>>> sweep_points(
    const std::vector<SweepAxis>& axes) {
  std::vector<std::vector<std::pair<std::string, std::string>>> points{{}};
  for (const SweepAxis& axis : axes) {
    std::vector<std::vector<std::pair<std::string, std::string>>> next;
    for (const auto& p : points) {
      for (const auto& v : axis.values) {
        auto q = p;
        q.emplace_back(axis.key, v);
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  return points;
}

int cmd_sweep(const std::string& template_text, const std::vector<SweepAxis>& axes,
              const fs::path& out, unsigned threads, bool strict, std::ostream& log) {
  const auto points = sweep_points(axes);
  fs::create_directories(out);
  std::vector<std::string> status(points.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;

  auto worker = [&]() {
    for (std::size_t k = next++; k < points.size(); k = next++) {
      const fs::path dir = out / fmt::format("point_{:04d}", k);
      std::ostringstream point_log;
      std::string result;
      try {
        ConfigOverrides overrides(points[k].begin(), points[k].end());
        overrides.emplace_back("output.directory", dir.string());
        const LoadedConfig loaded = parse_config(template_text, strict, overrides);
        result = cmd_verify(loaded.config, dir, point_log) == 0 ? "pass" : "fail";
      } catch (const std::exception& e) {
        result = "error";
        point_log << e.what() << "\n";
      }
      status[k] = result;
      std::lock_guard lock(log_mutex);
      log << fmt::format("[{}/{}] {} {}\n", k + 1, points.size(), dir.filename().string(),
                         result);
      if (result != "pass") log << point_log.str();
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, points.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  // Written once all points finished, in point order, so the index does not
  // depend on scheduling.
  std::string index = "index,directory";
  for (const auto& axis : axes) index += "," + axis.key;
  index += ",status\n";
  bool ok = true;
  for (std::size_t k = 0; k < points.size(); ++k) {
    index += fmt::format("{},point_{:04d}", k, k);
    for (const auto& [key, value] : points[k]) index += "," + value;
    index += "," + status[k] + "\n";
    ok = ok && status[k] == "pass";
  }
  output::write_text(out / "index.csv", index);
  return ok ? 0 : 1;
}

}  // namespace coagflux
