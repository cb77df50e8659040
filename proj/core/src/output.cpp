#include "coagflux/output.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "coagflux/config.hpp"

namespace coagflux::output {

namespace fs = std::filesystem;

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

namespace {

std::string row(std::initializer_list<double> values) {
  std::string line;
  bool first = true;
  for (double v : values) {
    if (!first) line += ',';
    line += format_double(v);
    first = false;
  }
  line += '\n';
  return line;
}

}  // namespace

void write_moments(const Trajectory& traj, const fs::path& path) {
  std::string text = "t,M0,M1,Mgl,Mml,leaked,injected\n";
  for (const Sample& s : traj.samples) {
    const Moments& m = s.moments;
    text += row({s.state.time, m.m0, m.m1, m.m_gamma_lambda, m.m_minus_lambda,
                 s.state.leaked_top_mass, s.state.injected_mass});
  }
  write_text(path, text);
}

void write_spectra(const Trajectory& traj, const fs::path& dir, int stride) {
  if (stride <= 0) return;
  const auto pivots = traj.grid.pivots();
  const std::size_t last = traj.samples.size() - 1;
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    if (k % static_cast<std::size_t>(stride) != 0 && k != last) continue;
    const State& state = traj.samples[k].state;
    std::string text = "pivot,count,mass\n";
    for (std::size_t i = 0; i < pivots.size(); ++i) {
      text += row({pivots[i], state.counts[i], pivots[i] * state.counts[i]});
    }
    write_text(dir / fmt::format("spectrum_{}.csv", k), text);
  }
}

void write_flux(const Trajectory& traj, const fs::path& path) {
  std::string text = "t,z,J,Jint,J1,J2,J3\n";
  for (std::size_t k = 0; k < traj.flux.size(); ++k) {
    const FluxSample& f = traj.flux[k];
    const double t = traj.samples[k].state.time;
    for (std::size_t p = 0; p < traj.probes.size(); ++p) {
      FluxRegions r;
      if (!f.regions.empty()) r = f.regions.front()[p];
      text += row({t, traj.probes[p], f.j[p], f.j_integral[p], r.j1, r.j2, r.j3});
    }
  }
  write_text(path, text);
}

void write_ledger_flux(const Trajectory& traj, const fs::path& path) {
  std::string text = "t,z,Jledger,Jledger_int\n";
  for (std::size_t k = 0; k < traj.flux.size(); ++k) {
    const FluxSample& f = traj.flux[k];
    const double t = traj.samples[k].state.time;
    for (std::size_t p = 0; p < traj.probes.size(); ++p) {
      text += row({t, traj.probes[p], f.j_ledger[p], f.ledger_integral[p]});
    }
  }
  write_text(path, text);
}

std::string records_json(const std::vector<DiagnosticRecord>& records) {
  // Non-finite values become null.
  auto number = [](double v) -> nlohmann::ordered_json {
    if (!std::isfinite(v)) return nullptr;
    return v;
  };
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const DiagnosticRecord& r : records) {
    nlohmann::ordered_json item;
    item["name"] = r.name;
    item["time"] = number(r.time);
    item["observed"] = number(r.observed);
    item["bound"] = number(r.bound_or_target);
    item["margin"] = number(r.margin);
    item["pass"] = r.pass;
    item["detail"] = r.detail;
    out.push_back(std::move(item));
  }
  return out.dump(1) + "\n";
}

void write_records(const std::vector<DiagnosticRecord>& records, const fs::path& path) {
  write_text(path, records_json(records));
}

void write_trajectory(const Trajectory& traj, const ScenarioConfig& config,
                      const fs::path& dir) {
  fs::create_directories(dir);
  write_text(dir / "config.ini", serialize_config(config));
  const bool csv = std::find(config.formats.begin(), config.formats.end(), "csv") !=
                   config.formats.end();
  if (!csv) return;
  write_moments(traj, dir / "moments.csv");
  write_spectra(traj, dir, config.spectrum_stride);
  write_flux(traj, dir / "flux.csv");
  write_ledger_flux(traj, dir / "flux_ledger.csv");
}

}  // namespace coagflux::output
