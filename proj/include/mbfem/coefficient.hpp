#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace mbfem {

/// Scalar coefficient of one variable: the reservoir concentration b(t), the
/// swelling resistance sigma(s), or a rate profile for assumption checks.
///
/// All kinds are closed under the affine rescaling g(z) = out * f(in * z),
/// which is how dimensional coefficients become dimensionless ones.
class CoefficientFunction {
 public:
  enum class Kind { constant, linear, smooth_cutoff, piecewise_linear };

  CoefficientFunction() = default;

  static CoefficientFunction constant(double value);
  /// f(x) = intercept + slope * x.
  static CoefficientFunction linear(double slope, double intercept = 0.0);
  /// Zero for x <= 0, C^1 smoothstep ramp on (0, ramp_end), `plateau` beyond.
  static CoefficientFunction smooth_cutoff(double plateau, double ramp_end);
  /// Linear interpolation of samples; held constant outside the sample range.
  static CoefficientFunction piecewise_linear(std::vector<double> x, std::vector<double> v);

  double operator()(double x) const;

  /// Returns x -> out_scale * f(in_scale * x).
  CoefficientFunction rescaled(double in_scale, double out_scale) const;

  Kind kind() const { return kind_; }
  const std::vector<double>& parameters() const { return params_; }

  nlohmann::json to_json() const;
  static CoefficientFunction from_json(const nlohmann::json& j);

 private:
  Kind kind_ = Kind::constant;
  // constant: {c}; linear: {slope, intercept}; smooth_cutoff: {plateau, ramp_end}
  std::vector<double> params_{0.0};
  std::vector<double> xs_, vs_;
};

std::string to_string(CoefficientFunction::Kind kind);

}  // namespace mbfem
