#include "mbfem/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mbfem/error.hpp"

namespace mbfem {
namespace {

constexpr int kCoefficientSamples = 201;
constexpr int kInitialSamples = 101;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

double get_or(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number()) throw ConfigError(std::string("parameter \"") + key + "\" must be a number");
  return v.get<double>();
}

}  // namespace

// --- PhysicalParams ---------------------------------------------------------

nlohmann::json PhysicalParams::to_json() const {
  return {{"D", D},   {"beta", beta}, {"H", H},   {"a0", a0},           {"s0", s0},
          {"L", L},   {"m0", m0},     {"Tf", Tf}, {"b", b.to_json()}, {"sigma", sigma.to_json()}};
}

PhysicalParams PhysicalParams::from_json(const nlohmann::json& j, const PhysicalParams& base) {
  if (!j.is_object()) throw ConfigError("physical parameters must be an object");
  static const std::vector<std::string> known{"D", "beta", "H", "a0", "s0",
                                              "L", "m0",   "Tf", "b", "sigma"};
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("unknown physical parameter \"" + key + "\"");
  PhysicalParams p = base;
  p.D = get_or(j, "D", p.D);
  p.beta = get_or(j, "beta", p.beta);
  p.H = get_or(j, "H", p.H);
  p.a0 = get_or(j, "a0", p.a0);
  p.s0 = get_or(j, "s0", p.s0);
  p.L = get_or(j, "L", p.L);
  p.m0 = get_or(j, "m0", p.m0);
  p.Tf = get_or(j, "Tf", p.Tf);
  if (j.contains("b")) p.b = CoefficientFunction::from_json(j.at("b"));
  if (j.contains("sigma")) p.sigma = CoefficientFunction::from_json(j.at("sigma"));
  return p;
}

PhysicalParams PhysicalParams::from_json(const nlohmann::json& j) {
  return from_json(j, PhysicalParams{});
}

nlohmann::json DimensionlessParams::to_json() const {
  return {{"Bi", Bi}, {"A0", A0}, {"h0", h0}, {"T", T}, {"H", H}, {"m0", m0},
          {"b_dimless", b_dimless.to_json()}, {"sigma_dimless", sigma_dimless.to_json()}};
}

// --- InitialCondition -------------------------------------------------------

InitialCondition InitialCondition::constant(double c) {
  InitialCondition u;
  u.kind_ = Kind::constant;
  u.coeffs_ = {c, 0.0};
  return u;
}

InitialCondition InitialCondition::affine(double a, double b) {
  InitialCondition u;
  u.kind_ = Kind::affine;
  u.coeffs_ = {a, b};
  return u;
}

InitialCondition InitialCondition::samples(std::vector<double> y, std::vector<double> v) {
  if (y.size() < 2 || y.size() != v.size())
    throw ConfigError("initial samples: need at least two matching (y, u) pairs");
  if (y.front() != 0.0 || y.back() != 1.0)
    throw ConfigError("initial samples must span y = 0 .. 1");
  for (std::size_t i = 1; i < y.size(); ++i)
    if (!(y[i] > y[i - 1])) throw ConfigError("initial sample abscissae must increase");
  InitialCondition u;
  u.kind_ = Kind::samples;
  u.ys_ = std::move(y);
  u.us_ = std::move(v);
  return u;
}

InitialCondition InitialCondition::custom(std::function<double(double)> f,
                                          std::function<double(double)> d2, std::string label) {
  if (!f) throw ConfigError("custom initial condition needs a function");
  InitialCondition u;
  u.kind_ = Kind::custom;
  u.f_ = std::move(f);
  u.d2_ = std::move(d2);
  u.label_ = std::move(label);
  return u;
}

double InitialCondition::operator()(double y) const {
  switch (kind_) {
    case Kind::constant:
    case Kind::affine:
      return coeffs_[0] + coeffs_[1] * y;
    case Kind::samples: {
      if (y <= ys_.front()) return us_.front();
      if (y >= ys_.back()) return us_.back();
      const auto it = std::upper_bound(ys_.begin(), ys_.end(), y);
      const std::size_t i = static_cast<std::size_t>(it - ys_.begin()) - 1;
      const double w = (y - ys_[i]) / (ys_[i + 1] - ys_[i]);
      return (1.0 - w) * us_[i] + w * us_[i + 1];
    }
    case Kind::custom:
      return f_(y);
  }
  return 0.0;
}

double InitialCondition::second_derivative(double y) const {
  if (kind_ != Kind::custom) return 0.0;
  if (d2_) return d2_(y);
  const double d = 1e-4;
  const double yc = std::clamp(y, d, 1.0 - d);
  return (f_(yc + d) - 2.0 * f_(yc) + f_(yc - d)) / (d * d);
}

nlohmann::json InitialCondition::to_json() const {
  switch (kind_) {
    case Kind::constant: return {{"kind", "constant"}, {"value", coeffs_[0]}};
    case Kind::affine: return {{"kind", "affine"}, {"a", coeffs_[0]}, {"b", coeffs_[1]}};
    case Kind::samples: return {{"kind", "samples"}, {"y", ys_}, {"u", us_}};
    case Kind::custom: return {{"kind", "custom"}, {"label", label_}};
  }
  return {};
}

InitialCondition InitialCondition::from_json(const nlohmann::json& j) {
  if (j.is_number()) return constant(j.get<double>());
  if (!j.is_object() || !j.contains("kind"))
    throw ConfigError("initial condition needs a \"kind\" field");
  const auto kind = j.at("kind").get<std::string>();
  try {
    if (kind == "constant") return constant(j.at("value").get<double>());
    if (kind == "affine") return affine(j.at("a").get<double>(), j.at("b").get<double>());
    if (kind == "samples")
      return samples(j.at("y").get<std::vector<double>>(), j.at("u").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("initial condition \"" + kind + "\": " + e.what());
  }
  throw ConfigError("unknown initial condition kind \"" + kind +
                    "\" (expected constant, affine or samples)");
}

// --- validation -------------------------------------------------------------

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const AssumptionCheck& c) { return c.passed || c.warning_only; });
}

std::vector<const AssumptionCheck*> ValidationReport::failures() const {
  std::vector<const AssumptionCheck*> out;
  for (const auto& c : checks)
    if (!c.passed && !c.warning_only) out.push_back(&c);
  return out;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.passed ? "ok   " : (c.warning_only ? "warn " : "FAIL ")) << c.id << ": "
       << c.description;
    if (!c.detail.empty()) os << " (" << c.detail << ")";
    os << '\n';
  }
  return os.str();
}

nlohmann::json ValidationReport::to_json() const {
  auto arr = nlohmann::json::array();
  for (const auto& c : checks)
    arr.push_back({{"id", c.id},
                   {"description", c.description},
                   {"passed", c.passed},
                   {"warning_only", c.warning_only},
                   {"detail", c.detail}});
  return {{"all_passed", all_passed()}, {"checks", arr}};
}

ValidationReport validate_assumptions(const PhysicalParams& p, const InitialCondition& u0) {
  ValidationReport r;
  auto add = [&](std::string id, std::string desc, bool ok, std::string detail = {},
                 bool warning = false) {
    r.checks.push_back({std::move(id), std::move(desc), ok, warning, std::move(detail)});
  };
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };

  {
    std::string bad;
    const std::pair<const char*, double> fields[] = {
        {"D", p.D}, {"beta", p.beta}, {"H", p.H}, {"a0", p.a0}, {"Tf", p.Tf}, {"m0", p.m0},
        {"L", p.L}};
    for (const auto& [name, v] : fields)
      if (!positive(v)) bad += std::string(bad.empty() ? "" : ", ") + name + " = " + fmt(v);
    add("A1", "D, beta, H, a0, Tf, m0, L are positive constants", bad.empty(), bad);
  }

  add("A5", "initial interface 0 < s0 < L",
      std::isfinite(p.s0) && p.s0 > 0.0 && p.s0 < p.L, "s0 = " + fmt(p.s0) + ", L = " + fmt(p.L));

  double b_low = std::numeric_limits<double>::infinity();
  double b_high = -b_low;
  for (int i = 0; i < kCoefficientSamples; ++i) {
    const double t = p.Tf * i / (kCoefficientSamples - 1);
    const double v = p.b(t);
    b_low = std::min(b_low, v);
    b_high = std::max(b_high, v);
  }
  add("A2", "reservoir b(t) bounded below by a positive constant on [0, Tf]",
      std::isfinite(b_low) && std::isfinite(b_high) && b_low > 0.0,
      "b in [" + fmt(b_low) + ", " + fmt(b_high) + "]");

  {
    bool nonneg = true;
    bool monotone = true;
    double prev = p.sigma(0.0);
    std::string detail;
    for (int i = 0; i < kCoefficientSamples; ++i) {
      const double s = p.L * i / (kCoefficientSamples - 1);
      const double v = p.sigma(s);
      if (!std::isfinite(v) || v < 0.0) {
        if (nonneg) detail = "sigma(" + fmt(s) + ") = " + fmt(v);
        nonneg = false;
      }
      if (v < prev) {
        if (monotone && detail.empty()) detail = "sigma decreases at s = " + fmt(s);
        monotone = false;
      }
      prev = v;
    }
    add("A4", "sigma(s) nonnegative and nondecreasing on [0, L]", nonneg && monotone, detail);
  }

  if (p.sigma.kind() == CoefficientFunction::Kind::smooth_cutoff) {
    // As printed this bound contradicts sigma = 0 near 0, so it is reported only.
    const double c0 = p.sigma.parameters()[0];
    const double bound = std::min(2.0 * p.sigma(0.0), b_high / p.H);
    add("A4", "plateau bound 0 < c0 < min{2 sigma(0), b*/H}", c0 > 0.0 && c0 < bound,
        "c0 = " + fmt(c0) + ", bound = " + fmt(bound), true);
  }

  {
    const double lo = p.sigma(0.0) / p.m0;
    const double hi = b_high / (p.H * p.m0);
    double umin = std::numeric_limits<double>::infinity();
    double umax = -umin;
    for (int i = 0; i < kInitialSamples; ++i) {
      const double v = u0(static_cast<double>(i) / (kInitialSamples - 1));
      umin = std::min(umin, v);
      umax = std::max(umax, v);
    }
    const double slack = 1e-12 * std::max(1.0, std::abs(hi));
    add("A5", "initial concentration sigma(0)/m0 <= u0 <= b*/(H m0)",
        std::isfinite(umin) && std::isfinite(umax) && umin >= lo - slack && umax <= hi + slack,
        "u0 in [" + fmt(umin) + ", " + fmt(umax) + "], admissible [" + fmt(lo) + ", " + fmt(hi) +
            "]");
  }
  return r;
}

void require_admissible(const PhysicalParams& p, const InitialCondition& u0) {
  const auto report = validate_assumptions(p, u0);
  if (!report.all_passed())
    throw ConfigError("parameters violate model assumptions:\n" + report.summary());
}

DimensionlessParams nondimensionalize(const PhysicalParams& p) {
  DimensionlessParams d;
  d.Bi = p.beta * p.L / p.D;
  d.A0 = p.a0 * p.m0 * p.L / p.D;
  d.h0 = p.s0 / p.L;
  d.T = p.Tf * p.D / (p.L * p.L);
  d.H = p.H;
  d.m0 = p.m0;
  const double time_scale = p.L * p.L / p.D;
  d.b_dimless = p.b.rescaled(time_scale, 1.0 / p.m0);
  d.sigma_dimless = p.sigma.rescaled(p.L, 1.0 / p.m0);
  for (double v : {d.Bi, d.A0, d.h0, d.T})
    if (!std::isfinite(v)) throw ConfigError("nondimensionalize: non-finite dimensionless group");
  return d;
}

double to_dimensionless_time(const PhysicalParams& p, double t_minutes) {
  return t_minutes * p.D / (p.L * p.L);
}

double to_physical_time(const PhysicalParams& p, double tau) { return tau * p.L * p.L / p.D; }

// --- presets ------------------------------------------------------------------

Preset preset(std::string_view name) {
  Preset out;
  out.name = std::string(name);
  // u0 = 1, i.e. the slab section [0, s0] starts at the reference concentration m0.
  out.initial = InitialCondition::constant(1.0);
  if (name == "dense") {
    out.params.sigma = CoefficientFunction::linear(1.0 / 10.0);
    out.params.a0 = 500.0;
  } else if (name == "foam") {
    out.params.sigma = CoefficientFunction::linear(1.0 / 50.0);
    out.params.a0 = 2000.0;
  } else {
    throw ConfigError("unknown preset \"" + std::string(name) + "\" (expected dense or foam)");
  }
  return out;
}

std::vector<std::string> preset_names() { return {"dense", "foam"}; }

}  // namespace mbfem
