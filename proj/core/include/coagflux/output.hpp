#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "coagflux/record.hpp"
#include "coagflux/scenario.hpp"
#include "coagflux/stepper.hpp"

namespace coagflux::output {

/// Fixed 17-significant-digit rendering used by every writer.
std::string format_double(double v);

/// moments.csv: t,M0,M1,Mgl,Mml,leaked,injected
void write_moments(const Trajectory& traj, const std::filesystem::path& path);

/// spectrum_<k>.csv for every `stride`-th sample (and always the last one):
/// pivot,count,mass
void write_spectra(const Trajectory& traj, const std::filesystem::path& dir, int stride);

/// flux.csv: t,z,J,Jint,J1,J2,J3 with the regions at the first delta.
void write_flux(const Trajectory& traj, const std::filesystem::path& path);

/// flux_ledger.csv: t,z,Jledger,Jledger_int
void write_ledger_flux(const Trajectory& traj, const std::filesystem::path& path);

/// JSON array of records: name,time,observed,bound,margin,pass,detail.
std::string records_json(const std::vector<DiagnosticRecord>& records);
void write_records(const std::vector<DiagnosticRecord>& records,
                   const std::filesystem::path& path);

/// Writes the trajectory files selected by config.formats into dir, plus
/// the normalized config as config.ini.
void write_trajectory(const Trajectory& traj, const ScenarioConfig& config,
                      const std::filesystem::path& dir);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace coagflux::output
