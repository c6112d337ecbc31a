#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "mbfem/config.hpp"
#include "mbfem/error_analysis.hpp"
#include "mbfem/integrator.hpp"

namespace mbfem::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_config = 2,
  exit_solver = 3,
  exit_band = 4,
};

/// Entry point of the `mbfem` executable. Progress goes to `out`; failures
/// are reported on `err` as a single JSON object {"error": {...}}.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct SimulateOutput {
  Trajectory trajectory;
  nlohmann::json manifest;
};

/// Writes trajectory.csv, manifest.json, profiles.svg and interface.svg into cfg.out_dir.
SimulateOutput run_simulate(const RunConfig& cfg, std::ostream& log);

struct StudyOutput {
  ErrorReport report;
  std::vector<BandResult> bands;
  bool bands_passed = true;
  nlohmann::json manifest;
};

/// Writes study.csv, study.svg and study_manifest.json into cfg.out_dir.
StudyOutput run_study(const RunConfig& cfg, std::ostream& log);

/// Writes sweep.csv, sweep.svg and sweep_manifest.json into cfg.out_dir.
nlohmann::json run_sweep(const RunConfig& cfg, std::ostream& log);

std::string study_svg(const ErrorReport& report);

}  // namespace mbfem::cli
