#include "mbfem/error_analysis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "mbfem/error.hpp"
#include "mbfem/quadrature.hpp"

namespace mbfem {
namespace {

void require_aligned(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size())
    throw ConfigError("misaligned time grids: " + std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()) + " samples");
  if (a.empty()) throw ConfigError("empty trajectory");
  const double scale = std::max(1.0, std::abs(a.times.back()));
  for (std::size_t j = 0; j < a.size(); ++j)
    if (std::abs(a.times[j] - b.times[j]) > 1e-12 * scale)
      throw ConfigError("misaligned time grids at sample " + std::to_string(j));
  if (!a.mesh || !b.mesh) throw ConfigError("trajectory without mesh");
}

void require_finer(const Mesh& coarse, const Mesh& reference) {
  if (reference.size() < coarse.size())
    throw ConfigError("reference mesh (" + std::to_string(reference.size()) +
                      " nodes) is coarser than the compared mesh (" +
                      std::to_string(coarse.size()) + " nodes)");
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
  double s = 0.0;
  for (std::size_t j = 1; j < t.size(); ++j) s += 0.5 * (t[j] - t[j - 1]) * (f[j] + f[j - 1]);
  return s;
}

// Union of two node sets; both contain 0 and 1.
std::vector<double> merged_nodes(const Mesh& a, const Mesh& b) {
  std::vector<double> y;
  y.reserve(a.size() + b.size());
  std::merge(a.nodes().begin(), a.nodes().end(), b.nodes().begin(), b.nodes().end(),
             std::back_inserter(y));
  std::vector<double> out;
  out.reserve(y.size());
  for (double v : y)
    if (out.empty() || v - out.back() > 1e-14) out.push_back(v);
  out.back() = 1.0;
  return out;
}

// Per-sample spatial quantities of the difference between two P1 functions.
class SpatialComparator {
 public:
  SpatialComparator(const Mesh& coarse, const Mesh& ref) : coarse_(coarse), ref_(ref) {
    const auto y = merged_nodes(coarse, ref);
    for (std::size_t i = 0; i + 1 < y.size(); ++i) {
      const double mid = 0.5 * (y[i] + y[i + 1]);
      pieces_.push_back({y[i], y[i + 1], coarse.locate(mid), ref.locate(mid)});
    }
    weights_.assign(coarse.size(), 0.0);
    ref_at_coarse_.resize(coarse.size());
    for (std::size_t e = 0; e < coarse.element_count(); ++e) {
      weights_[e] += 0.5 * coarse.element_size(e);
      weights_[e + 1] += 0.5 * coarse.element_size(e);
    }
    for (std::size_t i = 0; i < coarse.size(); ++i) ref_at_coarse_[i] = ref.locate(coarse.node(i));
  }

  double l2_nodal_sq(std::span<const double> uc, std::span<const double> ur) const {
    double s = 0.0;
    for (std::size_t i = 0; i < coarse_.size(); ++i) {
      const double d = ref_value(ur, i) - uc[i];
      s += weights_[i] * d * d;
    }
    return s;
  }

  double l2_exact_sq(std::span<const double> uc, std::span<const double> ur) const {
    double s = 0.0;
    for (const auto& p : pieces_) {
      const double da = linear(coarse_, uc, p.ec, p.a) - linear(ref_, ur, p.er, p.a);
      const double db = linear(coarse_, uc, p.ec, p.b) - linear(ref_, ur, p.er, p.b);
      s += (p.b - p.a) * (da * da + da * db + db * db) / 3.0;
    }
    return s;
  }

  double h1_exact_sq(std::span<const double> uc, std::span<const double> ur) const {
    double s = 0.0;
    for (const auto& p : pieces_) {
      const double d = slope(coarse_, uc, p.ec) - slope(ref_, ur, p.er);
      s += (p.b - p.a) * d * d;
    }
    return s;
  }

  double h1_restricted_sq(std::span<const double> uc, std::span<const double> ur) const {
    double s = 0.0;
    for (std::size_t e = 0; e < coarse_.element_count(); ++e) {
      const double k = coarse_.element_size(e);
      const double d = ((ref_value(ur, e + 1) - ref_value(ur, e)) - (uc[e + 1] - uc[e])) / k;
      s += k * d * d;
    }
    return s;
  }

 private:
  struct Piece {
    double a, b;
    std::size_t ec, er;
  };

  static double slope(const Mesh& m, std::span<const double> u, std::size_t e) {
    return (u[e + 1] - u[e]) / m.element_size(e);
  }
  static double linear(const Mesh& m, std::span<const double> u, std::size_t e, double y) {
    return u[e] + slope(m, u, e) * (y - m.node(e));
  }
  double ref_value(std::span<const double> ur, std::size_t coarse_node) const {
    return linear(ref_, ur, ref_at_coarse_[coarse_node], coarse_.node(coarse_node));
  }

  const Mesh& coarse_;
  const Mesh& ref_;
  std::vector<Piece> pieces_;
  std::vector<double> weights_;
  std::vector<std::size_t> ref_at_coarse_;
};

double l2_sq(const SpatialComparator& cmp, const NormOptions& opts, std::span<const double> uc,
             std::span<const double> ur) {
  return opts.l2 == SpatialQuadrature::nodal ? cmp.l2_nodal_sq(uc, ur) : cmp.l2_exact_sq(uc, ur);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string fmt_num(double v) {
  if (!std::isfinite(v)) return "";
  return fmt::format("{:.10g}", v);
}

}  // namespace

std::string to_string(NormKind k) {
  switch (k) {
    case NormKind::l2_l2: return "L2L2";
    case NormKind::l2_h1: return "L2H1";
    case NormKind::linf_l2: return "LinfL2";
    case NormKind::boundary_l2: return "boundary_L2";
    case NormKind::boundary_deriv_l2: return "boundary_deriv_L2";
  }
  return "unknown";
}

NormKind norm_from_string(const std::string& s) {
  const std::string l = lower(s);
  for (NormKind k : all_norms())
    if (lower(to_string(k)) == l) return k;
  throw ConfigError("unknown norm \"" + s +
                    "\" (expected L2L2, L2H1, LinfL2, boundary_L2 or boundary_deriv_L2)");
}

const std::vector<NormKind>& all_norms() {
  static const std::vector<NormKind> v{NormKind::l2_l2, NormKind::l2_h1, NormKind::linf_l2,
                                       NormKind::boundary_l2, NormKind::boundary_deriv_l2};
  return v;
}

double discrete_error(const Trajectory& coarse, const Trajectory& reference, NormKind kind,
                      const NormOptions& opts) {
  require_aligned(coarse, reference);
  const auto& t = coarse.times;
  std::vector<double> f(coarse.size());
  if (kind == NormKind::boundary_l2 || kind == NormKind::boundary_deriv_l2) {
    for (std::size_t j = 0; j < f.size(); ++j) {
      const auto& c = coarse.states[j];
      const auto& r = reference.states[j];
      const double d = kind == NormKind::boundary_l2 ? c.h - r.h : c.hprime - r.hprime;
      f[j] = d * d;
    }
    return std::sqrt(trapezoid(t, f));
  }
  require_finer(*coarse.mesh, *reference.mesh);
  const SpatialComparator cmp(*coarse.mesh, *reference.mesh);
  for (std::size_t j = 0; j < f.size(); ++j) {
    const auto& uc = coarse.states[j].alpha;
    const auto& ur = reference.states[j].alpha;
    f[j] = l2_sq(cmp, opts, uc, ur);
    if (kind == NormKind::l2_h1)
      f[j] += opts.gradient == GradientComparison::exact ? cmp.h1_exact_sq(uc, ur)
                                                         : cmp.h1_restricted_sq(uc, ur);
  }
  if (kind == NormKind::linf_l2) return std::sqrt(*std::max_element(f.begin(), f.end()));
  return std::sqrt(trapezoid(t, f));
}

double true_squared_error(const Trajectory& coarse, const Trajectory& reference) {
  require_aligned(coarse, reference);
  require_finer(*coarse.mesh, *reference.mesh);
  const SpatialComparator cmp(*coarse.mesh, *reference.mesh);
  double sup_l2 = 0.0;
  double sup_h = 0.0;
  std::vector<double> grad(coarse.size());
  for (std::size_t j = 0; j < coarse.size(); ++j) {
    const auto& c = coarse.states[j];
    const auto& r = reference.states[j];
    sup_l2 = std::max(sup_l2, cmp.l2_exact_sq(c.alpha, r.alpha));
    grad[j] = cmp.h1_exact_sq(c.alpha, r.alpha);
    sup_h = std::max(sup_h, (c.h - r.h) * (c.h - r.h));
  }
  return sup_l2 + trapezoid(coarse.times, grad) + sup_h;
}

Estimate aposteriori_estimate(const Trajectory& traj, const FemOperators& ops,
                              const DimensionlessParams& params, const InitialCondition& u0) {
  if (traj.empty()) throw ConfigError("aposteriori_estimate: empty trajectory");
  if (traj.rhs_snapshots.size() != traj.size())
    throw ConfigError("aposteriori_estimate: trajectory has no rhs snapshots");
  const Mesh& mesh = *ops.mesh;
  if (traj.mesh && traj.mesh->size() != mesh.size())
    throw ConfigError("aposteriori_estimate: operators do not match the trajectory mesh");
  const std::size_t ne = mesh.element_count();

  std::vector<double> integral(ne, 0.0);
  std::vector<double> prev;
  for (std::size_t j = 0; j < traj.size(); ++j) {
    const auto& s = traj.states[j];
    auto r = residual(ops, {s.alpha, traj.rhs_snapshots[j], s.h, s.hprime, s.tau}, params);
    if (j > 0) {
      const double dt = traj.times[j] - traj.times[j - 1];
      for (std::size_t e = 0; e < ne; ++e) integral[e] += 0.5 * dt * (r[e] + prev[e]);
    }
    prev = std::move(r);
  }

  Estimate est;
  est.per_element.resize(ne);
  est.initial_interface = 0.0;  // h_k(0) = h(0) = h0
  for (std::size_t e = 0; e < ne; ++e) {
    const double k = mesh.element_size(e);
    double h2 = 0.0;
    if (!u0.piecewise_linear()) {
      h2 = integrate(
          [&](double y) {
            const double d2 = u0.second_derivative(y);
            return d2 * d2;
          },
          mesh.node(e), mesh.node(e + 1));
    }
    const double res = k * k * integral[e];
    const double data = k * k * k * k * h2;
    est.per_element[e] = res + data;
    est.residual_part += res;
    est.initial_data_part += data;
  }
  est.eta_total = est.initial_interface + est.residual_part + est.initial_data_part;
  return est;
}

double convergence_order(double e_coarse, double e_fine) {
  if (!(e_coarse > 0.0) || !(e_fine > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::log2(e_coarse / e_fine);
}

void StudyConfig::validate() const {
  integrator.validate();
  if (meshes.empty()) throw ConfigError("study: no mesh levels");
  if (norms.empty()) throw ConfigError("study: no norms selected");
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    if (meshes[i] < 3) throw ConfigError("study: meshes need at least 3 nodes");
    if (i > 0 && meshes[i] != 2 * meshes[i - 1])
      throw ConfigError("study: node counts must double between levels (" +
                        std::to_string(meshes[i - 1]) + " -> " + std::to_string(meshes[i]) + ")");
  }
  std::size_t r = meshes.front();
  while (r < reference_n) r *= 2;
  if (r != reference_n || reference_n <= meshes.back())
    throw ConfigError("study: reference N = " + std::to_string(reference_n) +
                      " must be a power-of-two multiple of the coarsest N = " +
                      std::to_string(meshes.front()) + " and finer than every level");
}

std::vector<OrderBand> ErrorReport::default_bands() {
  const double inf = std::numeric_limits<double>::infinity();
  return {{NormKind::boundary_l2, 0.8, 1.3},
          {NormKind::boundary_deriv_l2, 0.8, 1.3},
          {NormKind::l2_h1, 0.8, 1.3},
          {NormKind::l2_l2, 1.0, inf}};
}

std::vector<BandResult> ErrorReport::check(const std::vector<OrderBand>& bands) const {
  std::vector<BandResult> out;
  for (const auto& b : bands) {
    if (std::find(norms.begin(), norms.end(), b.norm) == norms.end()) continue;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto it = rows[i].order.find(b.norm);
      const double r = it == rows[i].order.end() ? std::numeric_limits<double>::quiet_NaN()
                                                 : it->second;
      out.push_back({b, i, r, r >= b.lo && r <= b.hi});
    }
  }
  return out;
}

std::string ErrorReport::to_csv() const {
  std::ostringstream os;
  os << "N,k";
  for (NormKind n : norms) os << ",err_" << to_string(n) << ",order_" << to_string(n);
  os << ",eta,true_error_sq,effectivity\n";
  for (const auto& r : rows) {
    os << r.n << ',' << fmt_num(r.k);
    for (NormKind n : norms) {
      os << ',' << fmt_num(r.error.at(n)) << ',';
      if (auto it = r.order.find(n); it != r.order.end()) os << fmt_num(it->second);
    }
    os << ',' << fmt_num(r.eta) << ',' << fmt_num(r.true_error_sq) << ','
       << fmt_num(r.effectivity) << '\n';
  }
  return os.str();
}

nlohmann::json ErrorReport::to_json() const {
  nlohmann::json j;
  j["reference_n"] = reference_n;
  j["norms"] = nlohmann::json::array();
  for (NormKind n : norms) j["norms"].push_back(to_string(n));
  auto num = [](double v) -> nlohmann::json {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
  };
  for (const auto& r : rows) {
    nlohmann::json row{{"N", r.n},
                       {"k", r.k},
                       {"eta", num(r.eta)},
                       {"true_error_sq", num(r.true_error_sq)},
                       {"effectivity", num(r.effectivity)},
                       {"energy", {{"max_l2_sq", r.energy.max_l2_sq},
                                   {"int_h1_semi_sq", r.energy.int_h1_semi_sq}}},
                       {"steps", r.steps}};
    for (NormKind n : norms) {
      row["error"][to_string(n)] = num(r.error.at(n));
      if (auto it = r.order.find(n); it != r.order.end()) row["order"][to_string(n)] = num(it->second);
    }
    j["rows"].push_back(row);
  }
  j["reference_energy"] = {{"max_l2_sq", reference_energy.max_l2_sq},
                           {"int_h1_semi_sq", reference_energy.int_h1_semi_sq}};
  return j;
}

ErrorReport build_report(const DimensionlessParams& params, const InitialCondition& u0,
                         const std::vector<const Trajectory*>& levels,
                         const std::vector<const FemOperators*>& level_ops,
                         const Trajectory& reference, const FemOperators& reference_ops,
                         const std::vector<NormKind>& norms, const NormOptions& opts,
                         bool estimator) {
  if (levels.size() != level_ops.size())
    throw ConfigError("build_report: operator count does not match level count");
  ErrorReport rep;
  rep.norms = norms;
  rep.reference_n = reference.mesh->size();
  rep.reference_energy = energy_diagnostic(reference, reference_ops);
  rep.reference_events = reference.events;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const Trajectory& tr = *levels[i];
    StudyRow row;
    row.n = tr.mesh->size();
    row.k = tr.mesh->k_max();
    row.steps = tr.steps;
    for (NormKind n : norms) row.error[n] = discrete_error(tr, reference, n, opts);
    if (i > 0)
      for (NormKind n : norms)
        row.order[n] = convergence_order(rep.rows.back().error.at(n), row.error.at(n));
    row.energy = energy_diagnostic(tr, *level_ops[i]);
    row.true_error_sq = true_squared_error(tr, reference);
    if (estimator) {
      row.eta = aposteriori_estimate(tr, *level_ops[i], params, u0).eta_total;
      row.effectivity = row.true_error_sq > 0.0 ? row.eta / row.true_error_sq
                                                : std::numeric_limits<double>::quiet_NaN();
    } else {
      row.eta = row.effectivity = std::numeric_limits<double>::quiet_NaN();
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

ErrorReport convergence_study(const DimensionlessParams& params, const InitialCondition& u0,
                              const StudyConfig& cfg) {
  cfg.validate();
  std::vector<std::size_t> counts = cfg.meshes;
  counts.push_back(cfg.reference_n);
  std::vector<FemOperators> ops;
  ops.reserve(counts.size());
  for (std::size_t n : counts) ops.push_back(assemble(std::make_shared<Mesh>(Mesh::uniform(n))));

  std::vector<Trajectory> traj(counts.size());
  const auto policy = cfg.parallel ? std::launch::async : std::launch::deferred;
  std::vector<std::future<Trajectory>> jobs;
  // Largest first so the longest solve starts immediately.
  for (std::size_t i = counts.size(); i-- > 0;)
    jobs.push_back(std::async(policy, [&, i] { return solve(params, ops[i], u0, cfg.integrator); }));
  for (std::size_t j = 0; j < jobs.size(); ++j) traj[counts.size() - 1 - j] = jobs[j].get();

  std::vector<const Trajectory*> levels;
  std::vector<const FemOperators*> level_ops;
  for (std::size_t i = 0; i + 1 < counts.size(); ++i) {
    levels.push_back(&traj[i]);
    level_ops.push_back(&ops[i]);
  }
  return build_report(params, u0, levels, level_ops, traj.back(), ops.back(), cfg.norms,
                      cfg.norm_options, cfg.estimator);
}

}  // namespace mbfem
