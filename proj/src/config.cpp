#include "mbfem/config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mbfem/error.hpp"
#include "mbfem/io.hpp"

namespace mbfem {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::vector<std::string> split_key(const std::string& key, std::size_t lineno) {
  std::vector<std::string> parts;
  std::stringstream ss(key);
  std::string p;
  while (std::getline(ss, p, '.')) {
    p = trim(p);
    if (p.size() >= 2 && p.front() == '"' && p.back() == '"') p = p.substr(1, p.size() - 2);
    if (p.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key segment");
    parts.push_back(p);
  }
  if (parts.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": missing key");
  return parts;
}

// Drops a comma that directly precedes a closing bracket (outside strings).
std::string drop_trailing_commas(const std::string& v) {
  std::string out;
  bool quoted = false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == '"' && (i == 0 || v[i - 1] != '\\')) quoted = !quoted;
    if (!quoted && v[i] == ',') {
      const auto next = v.find_first_not_of(" \t\r\n", i + 1);
      if (next != std::string::npos && (v[next] == ']' || v[next] == '}')) continue;
    }
    out += v[i];
  }
  return out;
}

nlohmann::json parse_value(std::string v, std::size_t lineno) {
  if (v.size() >= 2 && v.front() == '\'' && v.back() == '\'')
    return nlohmann::json(v.substr(1, v.size() - 2));
  v = drop_trailing_commas(v);
  try {
    return nlohmann::json::parse(v);
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config line " + std::to_string(lineno) + ": cannot parse value `" + v + "`");
  }
}

nlohmann::json parse_key_value(std::string_view text) {
  nlohmann::json root = nlohmann::json::object();
  std::vector<std::string> section;
  std::istringstream is{std::string(text)};
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section header");
      section = split_key(line.substr(1, line.size() - 2), lineno);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    auto path = section;
    for (auto& p : split_key(line.substr(0, eq), lineno)) path.push_back(p);
    std::string value = trim(line.substr(eq + 1));
    // Arrays may continue over several lines.
    const auto depth = [](const std::string& s) {
      return std::count(s.begin(), s.end(), '[') - std::count(s.begin(), s.end(), ']');
    };
    while (depth(value) > 0 && std::getline(is, raw)) {
      ++lineno;
      value += " " + trim(strip_comment(raw));
    }
    if (value.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": missing value");
    nlohmann::json* node = &root;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      node = &(*node)[path[i]];
      if (!node->is_object() && !node->is_null())
        throw ConfigError("config line " + std::to_string(lineno) + ": key \"" + path[i] +
                          "\" is both a value and a table");
    }
    (*node)[path.back()] = parse_value(value, lineno);
  }
  return root;
}

void reject_unknown(const nlohmann::json& j, const std::vector<std::string>& known,
                    const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a table/object");
  for (const auto& [k, v] : j.items())
    if (std::find(known.begin(), known.end(), k) == known.end())
      throw ConfigError("unknown key \"" + k + "\" in " + where);
}

template <class T>
T get(const nlohmann::json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

double positive_size(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(what) + " must be positive");
  return v;
}

ViolationPolicy policy_from_string(const std::string& s) {
  if (s == "abort") return ViolationPolicy::abort;
  if (s == "record") return ViolationPolicy::record;
  throw ConfigError("on_violation must be \"abort\" or \"record\"");
}

InitialProjection projection_from_string(const std::string& s) {
  if (s == "interpolation") return InitialProjection::interpolation;
  if (s == "l2") return InitialProjection::l2;
  throw ConfigError("initial projection must be \"interpolation\" or \"l2\"");
}

TimeSettings time_from_json(const nlohmann::json& j, TimeSettings t, const std::string& where) {
  reject_unknown(j,
                 {"scheme", "dt", "rel_tol", "abs_tol", "output_stride", "max_steps", "initial",
                  "on_violation", "concentration_bound", "stability_safety"},
                 where);
  if (j.contains("scheme")) t.scheme = scheme_from_string(get<std::string>(j, "scheme", "", where));
  t.dt_minutes = get(j, "dt", t.dt_minutes, where);
  t.rel_tol = get(j, "rel_tol", t.rel_tol, where);
  t.abs_tol = get(j, "abs_tol", t.abs_tol, where);
  t.output_stride_minutes = get(j, "output_stride", t.output_stride_minutes, where);
  t.max_steps = get(j, "max_steps", t.max_steps, where);
  if (j.contains("initial")) t.initial = projection_from_string(get<std::string>(j, "initial", "", where));
  if (j.contains("on_violation"))
    t.on_violation = policy_from_string(get<std::string>(j, "on_violation", "", where));
  t.concentration_bound = get(j, "concentration_bound", t.concentration_bound, where);
  t.stability_safety = get(j, "stability_safety", t.stability_safety, where);
  return t;
}

}  // namespace

nlohmann::json parse_config_text(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') {
    try {
      return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("invalid JSON config: ") + e.what());
    }
  }
  return parse_key_value(text);
}

Mesh MeshSpec::build() const {
  if (kind == "uniform") return Mesh::uniform(n);
  if (kind == "graded") return Mesh::graded(n, ratio);
  throw ConfigError("mesh kind must be \"uniform\" or \"graded\"");
}

nlohmann::json MeshSpec::to_json() const { return {{"kind", kind}, {"n", n}, {"ratio", ratio}}; }

IntegratorConfig TimeSettings::to_integrator(const PhysicalParams& p) const {
  IntegratorConfig c;
  c.scheme = scheme;
  c.dt = to_dimensionless_time(p, positive_size(dt_minutes, "integrator.dt"));
  c.rel_tol = rel_tol;
  c.abs_tol = abs_tol;
  c.output_stride =
      to_dimensionless_time(p, positive_size(output_stride_minutes, "integrator.output_stride"));
  c.max_steps = max_steps;
  c.initial = initial;
  c.on_violation = on_violation;
  c.concentration_bound = concentration_bound;
  c.stability_safety = stability_safety;
  c.validate();
  return c;
}

nlohmann::json TimeSettings::to_json() const {
  return {{"scheme", to_string(scheme)},
          {"dt", dt_minutes},
          {"rel_tol", rel_tol},
          {"abs_tol", abs_tol},
          {"output_stride", output_stride_minutes},
          {"max_steps", max_steps},
          {"initial", initial == InitialProjection::interpolation ? "interpolation" : "l2"},
          {"on_violation", on_violation == ViolationPolicy::abort ? "abort" : "record"},
          {"concentration_bound", concentration_bound},
          {"stability_safety", stability_safety}};
}

TimeSettings StudySettings::default_integrator() {
  TimeSettings t;
  t.scheme = Scheme::rk4;
  t.dt_minutes = 1e-4;
  t.output_stride_minutes = 0.01;
  return t;
}

StudyConfig StudySettings::to_study(const PhysicalParams& p) const {
  StudyConfig c;
  c.meshes = meshes;
  c.reference_n = reference_n;
  c.integrator = integrator.to_integrator(p);
  c.norms = norms;
  c.norm_options = norm_options;
  c.parallel = parallel;
  c.validate();
  return c;
}

nlohmann::json StudySettings::to_json() const {
  auto names = nlohmann::json::array();
  for (NormKind n : norms) names.push_back(to_string(n));
  return {{"meshes", meshes},
          {"reference_n", reference_n},
          {"norms", names},
          {"l2_quadrature", norm_options.l2 == SpatialQuadrature::nodal ? "nodal" : "exact"},
          {"gradient", norm_options.gradient == GradientComparison::exact ? "exact" : "restricted"},
          {"parallel", parallel},
          {"integrator", integrator.to_json()}};
}

nlohmann::json SweepSettings::to_json() const {
  return {{"parameter", parameter}, {"values", values}};
}

void set_physical_parameter(PhysicalParams& p, const std::string& name, double value) {
  if (name == "D") p.D = value;
  else if (name == "beta") p.beta = value;
  else if (name == "H") p.H = value;
  else if (name == "a0") p.a0 = value;
  else if (name == "s0") p.s0 = value;
  else if (name == "L") p.L = value;
  else if (name == "m0") p.m0 = value;
  else if (name == "Tf") p.Tf = value;
  else
    throw ConfigError("cannot sweep \"" + name + "\" (expected D, beta, H, a0, s0, L, m0 or Tf)");
}

RunConfig RunConfig::from_preset(const std::string& name) {
  const Preset pr = mbfem::preset(name);
  RunConfig c;
  c.preset = pr.name;
  c.params = pr.params;
  c.initial = pr.initial;
  return c;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  reject_unknown(j,
                 {"preset", "params", "initial", "mesh", "integrator", "study", "sweep", "output",
                  "experimental"},
                 "config");
  RunConfig c = from_preset(get<std::string>(j, "preset", "dense", "config"));
  if (j.contains("params")) c.params = PhysicalParams::from_json(j.at("params"), c.params);
  if (j.contains("initial")) c.initial = InitialCondition::from_json(j.at("initial"));
  if (j.contains("mesh")) {
    const auto& m = j.at("mesh");
    reject_unknown(m, {"kind", "n", "ratio"}, "mesh");
    c.mesh.kind = get(m, "kind", c.mesh.kind, "mesh");
    c.mesh.n = get(m, "n", c.mesh.n, "mesh");
    c.mesh.ratio = get(m, "ratio", c.mesh.ratio, "mesh");
  }
  if (j.contains("integrator")) c.integrator = time_from_json(j.at("integrator"), c.integrator, "integrator");
  if (j.contains("study")) {
    const auto& s = j.at("study");
    reject_unknown(s,
                   {"meshes", "reference_n", "norms", "l2_quadrature", "gradient", "parallel",
                    "integrator"},
                   "study");
    c.study.meshes = get(s, "meshes", c.study.meshes, "study");
    c.study.reference_n = get(s, "reference_n", c.study.reference_n, "study");
    if (s.contains("norms")) {
      c.study.norms.clear();
      for (const auto& n : get<std::vector<std::string>>(s, "norms", {}, "study"))
        c.study.norms.push_back(norm_from_string(n));
    }
    if (s.contains("l2_quadrature")) {
      const auto q = get<std::string>(s, "l2_quadrature", "", "study");
      if (q != "nodal" && q != "exact") throw ConfigError("study.l2_quadrature must be nodal or exact");
      c.study.norm_options.l2 = q == "nodal" ? SpatialQuadrature::nodal : SpatialQuadrature::exact;
    }
    if (s.contains("gradient")) {
      const auto g = get<std::string>(s, "gradient", "", "study");
      if (g != "exact" && g != "restricted")
        throw ConfigError("study.gradient must be exact or restricted");
      c.study.norm_options.gradient =
          g == "exact" ? GradientComparison::exact : GradientComparison::restricted;
    }
    c.study.parallel = get(s, "parallel", c.study.parallel, "study");
    if (s.contains("integrator"))
      c.study.integrator = time_from_json(s.at("integrator"), c.study.integrator, "study.integrator");
  }
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    reject_unknown(s, {"parameter", "values"}, "sweep");
    c.sweep.parameter = get(s, "parameter", c.sweep.parameter, "sweep");
    c.sweep.values = get(s, "values", c.sweep.values, "sweep");
  }
  if (j.contains("output")) c.out_dir = get<std::string>(j, "output", "out", "config");
  if (j.contains("experimental"))
    c.experimental = std::filesystem::path(get<std::string>(j, "experimental", "", "config"));
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  return from_json(parse_config_text(read_text_file(path)));
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j{{"preset", preset},
                   {"params", params.to_json()},
                   {"initial", initial.to_json()},
                   {"mesh", mesh.to_json()},
                   {"integrator", integrator.to_json()},
                   {"study", study.to_json()},
                   {"sweep", sweep.to_json()},
                   {"output", out_dir.string()}};
  if (experimental) j["experimental"] = experimental->string();
  return j;
}

}  // namespace mbfem
