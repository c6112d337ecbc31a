#include "mbfem/coefficient.hpp"

#include <algorithm>
#include <cmath>

#include "mbfem/error.hpp"

namespace mbfem {

CoefficientFunction CoefficientFunction::constant(double value) {
  CoefficientFunction f;
  f.kind_ = Kind::constant;
  f.params_ = {value};
  return f;
}

CoefficientFunction CoefficientFunction::linear(double slope, double intercept) {
  CoefficientFunction f;
  f.kind_ = Kind::linear;
  f.params_ = {slope, intercept};
  return f;
}

CoefficientFunction CoefficientFunction::smooth_cutoff(double plateau, double ramp_end) {
  if (!(ramp_end > 0.0)) throw ConfigError("smooth_cutoff: ramp_end must be positive");
  CoefficientFunction f;
  f.kind_ = Kind::smooth_cutoff;
  f.params_ = {plateau, ramp_end};
  return f;
}

CoefficientFunction CoefficientFunction::piecewise_linear(std::vector<double> x,
                                                          std::vector<double> v) {
  if (x.empty() || x.size() != v.size())
    throw ConfigError("piecewise_linear: need matching, nonempty x and value arrays");
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1])) throw ConfigError("piecewise_linear: x must be strictly increasing");
  CoefficientFunction f;
  f.kind_ = Kind::piecewise_linear;
  f.params_.clear();
  f.xs_ = std::move(x);
  f.vs_ = std::move(v);
  return f;
}

double CoefficientFunction::operator()(double x) const {
  switch (kind_) {
    case Kind::constant:
      return params_[0];
    case Kind::linear:
      return params_[1] + params_[0] * x;
    case Kind::smooth_cutoff: {
      const double plateau = params_[0];
      const double r = params_[1];
      if (x <= 0.0) return 0.0;
      if (x >= r) return plateau;
      const double t = x / r;
      return plateau * t * t * (3.0 - 2.0 * t);
    }
    case Kind::piecewise_linear: {
      if (x <= xs_.front()) return vs_.front();
      if (x >= xs_.back()) return vs_.back();
      const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
      const std::size_t i = static_cast<std::size_t>(it - xs_.begin()) - 1;
      const double w = (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
      return (1.0 - w) * vs_[i] + w * vs_[i + 1];
    }
  }
  return 0.0;
}

CoefficientFunction CoefficientFunction::rescaled(double in_scale, double out_scale) const {
  if (!(in_scale > 0.0)) throw ConfigError("rescaled: input scale must be positive");
  switch (kind_) {
    case Kind::constant:
      return constant(out_scale * params_[0]);
    case Kind::linear:
      return linear(out_scale * in_scale * params_[0], out_scale * params_[1]);
    case Kind::smooth_cutoff:
      return smooth_cutoff(out_scale * params_[0], params_[1] / in_scale);
    case Kind::piecewise_linear: {
      std::vector<double> x(xs_.size()), v(vs_.size());
      for (std::size_t i = 0; i < xs_.size(); ++i) {
        x[i] = xs_[i] / in_scale;
        v[i] = vs_[i] * out_scale;
      }
      return piecewise_linear(std::move(x), std::move(v));
    }
  }
  return *this;
}

std::string to_string(CoefficientFunction::Kind kind) {
  switch (kind) {
    case CoefficientFunction::Kind::constant: return "constant";
    case CoefficientFunction::Kind::linear: return "linear";
    case CoefficientFunction::Kind::smooth_cutoff: return "smooth_cutoff";
    case CoefficientFunction::Kind::piecewise_linear: return "piecewise_linear";
  }
  return "unknown";
}

nlohmann::json CoefficientFunction::to_json() const {
  nlohmann::json j;
  j["kind"] = to_string(kind_);
  switch (kind_) {
    case Kind::constant:
      j["value"] = params_[0];
      break;
    case Kind::linear:
      j["slope"] = params_[0];
      j["intercept"] = params_[1];
      break;
    case Kind::smooth_cutoff:
      j["plateau"] = params_[0];
      j["ramp_end"] = params_[1];
      break;
    case Kind::piecewise_linear:
      j["x"] = xs_;
      j["values"] = vs_;
      break;
  }
  return j;
}

CoefficientFunction CoefficientFunction::from_json(const nlohmann::json& j) {
  if (j.is_number()) return constant(j.get<double>());
  if (!j.is_object() || !j.contains("kind"))
    throw ConfigError("coefficient function needs a \"kind\" field");
  const auto kind = j.at("kind").get<std::string>();
  try {
    if (kind == "constant") return constant(j.at("value").get<double>());
    if (kind == "linear") return linear(j.at("slope").get<double>(), j.value("intercept", 0.0));
    if (kind == "smooth_cutoff")
      return smooth_cutoff(j.at("plateau").get<double>(), j.at("ramp_end").get<double>());
    if (kind == "piecewise_linear")
      return piecewise_linear(j.at("x").get<std::vector<double>>(),
                              j.at("values").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("coefficient function \"" + kind + "\": " + e.what());
  }
  throw ConfigError("unknown coefficient kind \"" + kind + "\"");
}

}  // namespace mbfem
