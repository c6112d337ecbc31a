#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mbfem/integrator.hpp"
#include "mbfem/physical.hpp"

namespace mbfem {

/// Shortest round-trip-safe text for a double ("%.17g").
std::string format_number(double v);

/// Header: tau,h,hprime,alpha_0,...,alpha_{N-1}; one row per recorded sample.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
std::string trajectory_csv(const Trajectory& traj);

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

/// Writes `content` to `path`, creating parent directories. Throws IoError.
void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

nlohmann::json events_json(const std::vector<Event>& events);

/// Measured interface positions: columns t [min], s [mm].
struct ExperimentalData {
  std::vector<double> t;
  std::vector<double> s;
};

/// Accepts a header row naming t and s (any column order) or two bare numeric columns.
ExperimentalData parse_experimental_csv(std::string_view text);
ExperimentalData read_experimental_csv(const std::filesystem::path& path);

/// Model interface position linearly interpolated at each data time.
/// Rows outside the simulated time span are reported with a null model value.
nlohmann::json experimental_residuals(const ExperimentalData& data, const PhysicalTrajectory& model);

}  // namespace mbfem
