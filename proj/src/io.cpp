#include "mbfem/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "mbfem/error.hpp"

namespace mbfem {

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const std::size_t n = traj.mesh ? traj.mesh->size() : 0;
  std::string line = "tau,h,hprime";
  for (std::size_t i = 0; i < n; ++i) line += fmt::format(",alpha_{}", i);
  os << line << '\n';
  for (std::size_t j = 0; j < traj.size(); ++j) {
    const auto& s = traj.states[j];
    line = format_number(traj.times[j]);
    line += ',';
    line += format_number(s.h);
    line += ',';
    line += format_number(s.hprime);
    for (double a : s.alpha) {
      line += ',';
      line += format_number(a);
    }
    os << line << '\n';
  }
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream os;
  write_trajectory_csv(os, traj);
  return os.str();
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", digest[i]);
  return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw IoError("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read " + path.string());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

nlohmann::json events_json(const std::vector<Event>& events) {
  auto j = nlohmann::json::array();
  for (const auto& e : events)
    j.push_back({{"kind", to_string(e.kind)}, {"tau", e.tau}, {"message", e.message}});
  return j;
}

namespace {

// Comma, semicolon or tab separated; plain whitespace when none of those occur.
std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  if (line.find_first_of(",;\t") == std::string::npos) {
    std::istringstream ws(line);
    for (std::string f; ws >> f;) out.push_back(f);
    return out;
  }
  std::string cur;
  for (char c : line) {
    if (c == ',' || c == ';' || c == '\t') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  for (auto& f : out) {
    const auto b = f.find_first_not_of(' ');
    const auto e = f.find_last_not_of(' ');
    f = b == std::string::npos ? "" : f.substr(b, e - b + 1);
  }
  return out;
}

bool parse_double(const std::string& s, double& v) {
  if (s.empty()) return false;
  char* end = nullptr;
  v = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(v);
}

}  // namespace

ExperimentalData parse_experimental_csv(std::string_view text) {
  ExperimentalData d;
  std::istringstream is{std::string(text)};
  std::string line;
  std::size_t ti = 0, si = 1, lineno = 0;
  bool header_seen = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    const auto f = split_fields(line);
    double a = 0.0;
    if (!header_seen && !parse_double(f[0], a)) {
      header_seen = true;
      ti = si = f.size();
      for (std::size_t i = 0; i < f.size(); ++i) {
        std::string l = f[i];
        std::transform(l.begin(), l.end(), l.begin(), ::tolower);
        if (l == "t" || l.rfind("t ", 0) == 0 || l.rfind("t[", 0) == 0 || l == "time") ti = i;
        if (l == "s" || l.rfind("s ", 0) == 0 || l.rfind("s[", 0) == 0 || l == "position") si = i;
      }
      if (ti == f.size() || si == f.size())
        throw ConfigError("experimental CSV: header must name columns t and s");
      continue;
    }
    header_seen = true;
    double t = 0.0, s = 0.0;
    if (std::max(ti, si) >= f.size() || !parse_double(f[ti], t) || !parse_double(f[si], s))
      throw ConfigError("experimental CSV: malformed row at line " + std::to_string(lineno));
    d.t.push_back(t);
    d.s.push_back(s);
  }
  if (d.t.empty()) throw ConfigError("experimental CSV: no data rows");
  return d;
}

ExperimentalData read_experimental_csv(const std::filesystem::path& path) {
  return parse_experimental_csv(read_text_file(path));
}

nlohmann::json experimental_residuals(const ExperimentalData& data, const PhysicalTrajectory& model) {
  nlohmann::json rows = nlohmann::json::array();
  double sq = 0.0, worst = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < data.t.size(); ++i) {
    const double t = data.t[i];
    nlohmann::json row{{"t", t}, {"s_data", data.s[i]}};
    if (model.t.empty() || t < model.t.front() || t > model.t.back()) {
      row["s_model"] = nullptr;
      row["residual"] = nullptr;
    } else {
      const auto it = std::lower_bound(model.t.begin(), model.t.end(), t);
      std::size_t j = static_cast<std::size_t>(it - model.t.begin());
      double sm = model.s[j];
      if (j > 0 && model.t[j] != t) {
        const double w = (t - model.t[j - 1]) / (model.t[j] - model.t[j - 1]);
        sm = (1.0 - w) * model.s[j - 1] + w * model.s[j];
      }
      const double r = data.s[i] - sm;
      row["s_model"] = sm;
      row["residual"] = r;
      sq += r * r;
      worst = std::max(worst, std::abs(r));
      ++used;
    }
    rows.push_back(row);
  }
  nlohmann::json out{{"rows", rows}, {"points_compared", used}};
  out["rms"] = used ? nlohmann::json(std::sqrt(sq / static_cast<double>(used))) : nlohmann::json(nullptr);
  out["max_abs"] = used ? nlohmann::json(worst) : nlohmann::json(nullptr);
  return out;
}

}  // namespace mbfem
