#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mbfem/error_analysis.hpp"
#include "mbfem/integrator.hpp"
#include "mbfem/mesh.hpp"
#include "mbfem/model.hpp"

namespace mbfem {

/// Parses JSON (text starting with '{') or TOML-style key/value text:
///
///   preset = "dense"
///   [params]
///   a0 = 500
///   sigma.kind = "linear"     # dotted keys nest
///   sigma.slope = 0.1
///   [study]
///   meshes = [20, 40, 80]
///
/// Both produce the same JSON document.
nlohmann::json parse_config_text(std::string_view text);

struct MeshSpec {
  std::string kind = "uniform";  ///< uniform | graded
  std::size_t n = 100;
  double ratio = 1.0;  ///< graded: size ratio of consecutive elements

  Mesh build() const;
  nlohmann::json to_json() const;
};

/// Integrator settings with times in minutes.
struct TimeSettings {
  Scheme scheme = Scheme::rk45;
  double dt_minutes = 1e-4;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double output_stride_minutes = 0.1;
  std::size_t max_steps = 200'000'000;
  InitialProjection initial = InitialProjection::interpolation;
  ViolationPolicy on_violation = ViolationPolicy::abort;
  double concentration_bound = 0.0;
  double stability_safety = 0.9;

  IntegratorConfig to_integrator(const PhysicalParams& p) const;
  nlohmann::json to_json() const;
};

struct StudySettings {
  std::vector<std::size_t> meshes{20, 40, 80, 160, 320};
  std::size_t reference_n = 640;
  std::vector<NormKind> norms = all_norms();
  NormOptions norm_options;
  bool parallel = true;
  /// Study runs use fixed RK4 at 1e-4 min and a 0.01 min recording stride
  /// unless the configuration overrides them.
  TimeSettings integrator = default_integrator();

  static TimeSettings default_integrator();
  StudyConfig to_study(const PhysicalParams& p) const;
  nlohmann::json to_json() const;
};

/// One-parameter sweep over a physical parameter (D, beta, H, a0, s0, L, m0, Tf).
struct SweepSettings {
  std::string parameter = "a0";
  std::vector<double> values{250.0, 500.0, 1000.0, 2000.0};
  nlohmann::json to_json() const;
};

struct RunConfig {
  std::string preset = "dense";
  PhysicalParams params;
  InitialCondition initial = InitialCondition::constant(1.0);
  MeshSpec mesh;
  TimeSettings integrator;
  StudySettings study;
  SweepSettings sweep;
  std::filesystem::path out_dir = "out";
  std::optional<std::filesystem::path> experimental;

  /// Starts from the named preset (default "dense") and applies the overrides.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::filesystem::path& path);
  static RunConfig from_preset(const std::string& name);
  nlohmann::json to_json() const;
};

/// Sets one named physical parameter; throws ConfigError on unknown names.
void set_physical_parameter(PhysicalParams& p, const std::string& name, double value);

}  // namespace mbfem
