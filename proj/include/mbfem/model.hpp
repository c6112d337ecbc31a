#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mbfem/coefficient.hpp"

namespace mbfem {

/// Dimensional model constants. Units: mm, min, gram.
struct PhysicalParams {
  double D = 3.66e-4;     ///< diffusivity [mm^2/min]
  double beta = 0.564;    ///< absorption rate [mm/min]
  double H = 2.5;         ///< Henry's constant [-]
  double a0 = 500.0;      ///< kinetic coefficient [mm^4/min/gram]
  double s0 = 0.01;       ///< initial interface position [mm]
  double L = 1.0;         ///< slab thickness [mm]
  double m0 = 0.1;        ///< reference concentration [gram/mm^3]
  double Tf = 40.0;       ///< final time [min]
  CoefficientFunction b = CoefficientFunction::constant(1.0);       ///< b(t) [gram/mm^3]
  CoefficientFunction sigma = CoefficientFunction::linear(0.1);     ///< sigma(s) [gram/mm^3]

  nlohmann::json to_json() const;
  /// Fields absent from `j` keep the values of `base`.
  static PhysicalParams from_json(const nlohmann::json& j, const PhysicalParams& base);
  static PhysicalParams from_json(const nlohmann::json& j);
};

/// Parameters of the Landau-transformed problem on [0, 1].
///
/// Scales: length L, time L^2/D, concentration m0.
struct DimensionlessParams {
  double Bi = 0.0;    ///< beta L / D
  double A0 = 0.0;    ///< a0 m0 L / D
  double h0 = 0.0;    ///< s0 / L
  double T = 0.0;     ///< Tf D / L^2
  double H = 1.0;
  double m0 = 1.0;
  CoefficientFunction b_dimless = CoefficientFunction::constant(0.0);      ///< of tau
  CoefficientFunction sigma_dimless = CoefficientFunction::constant(0.0);  ///< of h

  nlohmann::json to_json() const;
};

/// Initial dimensionless concentration u0(y) on [0, 1].
class InitialCondition {
 public:
  enum class Kind { constant, affine, samples, custom };

  static InitialCondition constant(double c);
  /// u0(y) = a + b y.
  static InitialCondition affine(double a, double b);
  /// Piecewise-linear through (y_i, u_i); y must span [0, 1].
  static InitialCondition samples(std::vector<double> y, std::vector<double> u);
  /// Closed-form profile; `d2` is its second derivative (used by the estimator).
  static InitialCondition custom(std::function<double(double)> f,
                                 std::function<double(double)> d2, std::string label);

  double operator()(double y) const;
  double second_derivative(double y) const;
  /// True when u0 is piecewise linear, so its H^2 seminorm vanishes elementwise.
  bool piecewise_linear() const { return kind_ != Kind::custom; }
  Kind kind() const { return kind_; }

  nlohmann::json to_json() const;
  static InitialCondition from_json(const nlohmann::json& j);

 private:
  Kind kind_ = Kind::constant;
  std::vector<double> coeffs_{0.0};
  std::vector<double> ys_, us_;
  std::function<double(double)> f_, d2_;
  std::string label_;
};

struct AssumptionCheck {
  std::string id;           ///< "A1", "A2", ...
  std::string description;
  bool passed = true;
  bool warning_only = false;
  std::string detail;       ///< violating value or sampled range
};

struct ValidationReport {
  std::vector<AssumptionCheck> checks;

  /// Ignores warning-only entries.
  bool all_passed() const;
  std::vector<const AssumptionCheck*> failures() const;
  std::string summary() const;
  nlohmann::json to_json() const;
};

ValidationReport validate_assumptions(const PhysicalParams& p, const InitialCondition& u0);

/// Throws ConfigError with the report summary unless every check passes.
void require_admissible(const PhysicalParams& p, const InitialCondition& u0);

DimensionlessParams nondimensionalize(const PhysicalParams& p);

/// Minutes -> dimensionless time and back.
double to_dimensionless_time(const PhysicalParams& p, double t_minutes);
double to_physical_time(const PhysicalParams& p, double tau);

/// Landau map y = x / s and its inverse.
inline double to_reference_coordinate(double x, double s) { return x / s; }
inline double to_physical_coordinate(double y, double s) { return y * s; }

/// Built-in parameter sets: "dense" and "foam" rubber.
struct Preset {
  std::string name;
  PhysicalParams params;
  InitialCondition initial;
};

Preset preset(std::string_view name);
std::vector<std::string> preset_names();

}  // namespace mbfem
