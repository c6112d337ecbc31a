#include "mbfem/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mbfem/error.hpp"
#include "mbfem/io.hpp"
#include "mbfem/physical.hpp"
#include "mbfem/svg.hpp"

namespace mbfem::cli {
namespace {

constexpr const char* kVersion = "0.1.0";

struct Artifacts {
  std::filesystem::path dir;
  nlohmann::json checksums = nlohmann::json::object();

  void write(const std::string& name, const std::string& content) {
    write_text_file(dir / name, content);
    checksums[name] = sha256_hex(content);
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Trajectory simulate_once(const RunConfig& cfg, DimensionlessParams& dim, FemOperators& ops) {
  require_admissible(cfg.params, cfg.initial);
  dim = nondimensionalize(cfg.params);
  ops = assemble(std::make_shared<Mesh>(cfg.mesh.build()));
  return solve(dim, ops, cfg.initial, cfg.integrator.to_integrator(cfg.params));
}

std::string profiles_svg(const Trajectory& traj, const RunConfig& cfg) {
  PlotSpec spec;
  spec.title = "Concentration profiles (" + cfg.preset + ")";
  spec.xlabel = "x [mm]";
  spec.ylabel = "m [gram/mm^3]";
  const double tf = to_physical_time(cfg.params, traj.times.back());
  std::vector<std::size_t> picked;
  for (double frac : {0.0, 0.025, 0.125, 0.25, 0.5, 0.75, 1.0}) {
    const double t = frac * tf;
    std::size_t best = 0;
    for (std::size_t j = 0; j < traj.size(); ++j)
      if (std::abs(to_physical_time(cfg.params, traj.times[j]) - t) <
          std::abs(to_physical_time(cfg.params, traj.times[best]) - t))
        best = j;
    if (std::find(picked.begin(), picked.end(), best) == picked.end()) picked.push_back(best);
  }
  for (std::size_t i = 0; i < picked.size(); ++i) {
    const Profile pr = physical_profile(traj, picked[i], cfg.params);
    spec.series.push_back({fmt::format("t = {:.3g} min", pr.t), pr.x, pr.m, palette(i)});
  }
  return render_svg(spec);
}

std::string interface_svg(const std::vector<std::pair<std::string, PhysicalTrajectory>>& runs,
                          const ExperimentalData* data) {
  PlotSpec spec;
  spec.title = "Position of the moving boundary";
  spec.xlabel = "t [min]";
  spec.ylabel = "s(t) [mm]";
  for (std::size_t i = 0; i < runs.size(); ++i)
    spec.series.push_back({runs[i].first, runs[i].second.t, runs[i].second.s, palette(i)});
  if (data) {
    Series s{"experiment", data->t, data->s, "#000000"};
    s.markers = true;
    s.line = false;
    spec.series.push_back(s);
  }
  return render_svg(spec);
}

nlohmann::json trajectory_summary(const Trajectory& traj, const PhysicalParams& p) {
  double amin = std::numeric_limits<double>::infinity();
  double amax = -amin;
  for (const auto& s : traj.states)
    for (double a : s.alpha) {
      amin = std::min(amin, a);
      amax = std::max(amax, a);
    }
  const auto& last = traj.back();
  return {{"samples", traj.size()},
          {"steps", traj.steps},
          {"rejected_steps", traj.rejected_steps},
          {"rhs_evaluations", traj.rhs_evaluations},
          {"final_tau", last.tau},
          {"final_t_minutes", to_physical_time(p, last.tau)},
          {"final_h", last.h},
          {"final_s_mm", p.L * last.h},
          {"min_alpha", amin},
          {"max_alpha", amax},
          {"breakthrough", traj.reached_breakthrough()}};
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

SimulateOutput run_simulate(const RunConfig& cfg, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  const ValidationReport report = validate_assumptions(cfg.params, cfg.initial);
  for (const auto* c : report.failures()) log << "assumption " << c->id << " failed: " << c->detail << '\n';
  for (const auto& c : report.checks)
    if (c.warning_only && !c.passed) log << "warning " << c.id << ": " << c.description << '\n';

  DimensionlessParams dim;
  FemOperators ops;
  SimulateOutput out;
  out.trajectory = simulate_once(cfg, dim, ops);
  const Trajectory& traj = out.trajectory;
  log << fmt::format("simulate: N = {}, {} steps, {} samples, s(T) = {:.6g} mm ({:.2f} s)\n",
                     traj.mesh->size(), traj.steps, traj.size(), cfg.params.L * traj.back().h,
                     seconds_since(t0));

  const PhysicalTrajectory phys = back_transform(traj, cfg.params);
  std::optional<ExperimentalData> data;
  if (cfg.experimental) data = read_experimental_csv(*cfg.experimental);

  Artifacts art{cfg.out_dir};
  art.write("trajectory.csv", trajectory_csv(traj));
  art.write("profiles.svg", profiles_svg(traj, cfg));
  art.write("interface.svg", interface_svg({{cfg.preset, phys}}, data ? &*data : nullptr));

  const EnergyDiagnostic energy = energy_diagnostic(traj, ops);
  const Estimate est = aposteriori_estimate(traj, ops, dim, cfg.initial);
  nlohmann::json m;
  m["tool"] = {{"name", "mbfem"}, {"version", kVersion}, {"mode", "simulate"}};
  m["config"] = cfg.to_json();
  m["mesh"] = {{"kind", cfg.mesh.kind}, {"n", traj.mesh->size()}, {"nodes", traj.mesh->nodes()}};
  m["params"] = {{"physical", cfg.params.to_json()}, {"dimensionless", dim.to_json()}};
  m["integrator"] = cfg.integrator.to_integrator(cfg.params).to_json();
  m["validation"] = report.to_json();
  m["events"] = events_json(traj.events);
  m["summary"] = trajectory_summary(traj, cfg.params);
  m["energy"] = {{"max_l2_sq", energy.max_l2_sq}, {"int_h1_semi_sq", energy.int_h1_semi_sq}};
  m["estimator"] = {{"eta_total", est.eta_total},
                    {"residual_part", est.residual_part},
                    {"initial_data_part", est.initial_data_part}};
  if (data) {
    m["experimental"] = {{"path", cfg.experimental->string()},
                         {"residuals", experimental_residuals(*data, phys)}};
  }
  m["checksums"] = art.checksums;
  write_text_file(cfg.out_dir / "manifest.json", m.dump(2) + "\n");
  out.manifest = std::move(m);
  return out;
}

std::string study_svg(const ErrorReport& report) {
  PlotSpec spec;
  spec.title = "Convergence against N = " + std::to_string(report.reference_n);
  spec.xlabel = "mesh size k";
  spec.ylabel = "error";
  spec.logx = spec.logy = true;
  spec.width = 760;
  for (std::size_t i = 0; i < report.norms.size(); ++i) {
    const NormKind n = report.norms[i];
    Series s{to_string(n), {}, {}, palette(i)};
    s.markers = true;
    for (const auto& r : report.rows) {
      s.x.push_back(r.k);
      s.y.push_back(r.error.at(n));
    }
    spec.series.push_back(s);
    if (!s.x.empty() && s.y.front() > 0.0) {
      Series guide{"", {s.x.front(), s.x.back()}, {s.y.front(), s.y.front() * s.x.back() / s.x.front()},
                   palette(i)};
      guide.dashed = true;
      spec.series.push_back(guide);
    }
  }
  Series legend{"slope 1", {}, {}, "#7f7f7f"};
  legend.dashed = true;
  spec.series.push_back(legend);
  return render_svg(spec);
}

StudyOutput run_study(const RunConfig& cfg, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  require_admissible(cfg.params, cfg.initial);
  const DimensionlessParams dim = nondimensionalize(cfg.params);
  const StudyConfig sc = cfg.study.to_study(cfg.params);
  StudyOutput out;
  out.report = convergence_study(dim, cfg.initial, sc);
  out.bands = out.report.check(ErrorReport::default_bands());
  out.bands_passed = std::all_of(out.bands.begin(), out.bands.end(),
                                 [](const BandResult& b) { return b.passed; });
  log << fmt::format("study: {} levels against N = {} ({:.1f} s)\n", out.report.rows.size(),
                     out.report.reference_n, seconds_since(t0));
  for (const auto& b : out.bands)
    log << fmt::format("  {:<18} N {:>4} -> {:>4}: order {:.3f} {}\n", to_string(b.band.norm),
                       out.report.rows[b.pair_index - 1].n, out.report.rows[b.pair_index].n, b.order,
                       b.passed ? "in band" : "OUT OF BAND");

  Artifacts art{cfg.out_dir};
  art.write("study.csv", out.report.to_csv());
  art.write("study.svg", study_svg(out.report));
  nlohmann::json bands = nlohmann::json::array();
  for (const auto& b : out.bands) {
    bands.push_back({{"norm", to_string(b.band.norm)},
                     {"coarse_n", out.report.rows[b.pair_index - 1].n},
                     {"fine_n", out.report.rows[b.pair_index].n},
                     {"order", std::isfinite(b.order) ? nlohmann::json(b.order) : nlohmann::json(nullptr)},
                     {"lo", b.band.lo},
                     {"hi", std::isfinite(b.band.hi) ? nlohmann::json(b.band.hi) : nlohmann::json(nullptr)},
                     {"passed", b.passed}});
  }
  nlohmann::json m;
  m["tool"] = {{"name", "mbfem"}, {"version", kVersion}, {"mode", "study"}};
  m["config"] = cfg.to_json();
  m["params"] = {{"physical", cfg.params.to_json()}, {"dimensionless", dim.to_json()}};
  m["integrator"] = sc.integrator.to_json();
  m["report"] = out.report.to_json();
  m["reference_events"] = events_json(out.report.reference_events);
  m["bands"] = bands;
  m["bands_passed"] = out.bands_passed;
  m["checksums"] = art.checksums;
  write_text_file(cfg.out_dir / "study_manifest.json", m.dump(2) + "\n");
  out.manifest = std::move(m);
  return out;
}

nlohmann::json run_sweep(const RunConfig& cfg, std::ostream& log) {
  if (cfg.sweep.values.empty()) throw ConfigError("sweep: no values given");
  std::vector<RunConfig> runs;
  for (double v : cfg.sweep.values) {
    RunConfig c = cfg;
    set_physical_parameter(c.params, cfg.sweep.parameter, v);
    require_admissible(c.params, c.initial);
    runs.push_back(std::move(c));
  }
  std::vector<std::future<Trajectory>> jobs;
  for (const auto& c : runs)
    jobs.push_back(std::async(std::launch::async, [&c] {
      DimensionlessParams dim;
      FemOperators ops;
      return simulate_once(c, dim, ops);
    }));
  std::vector<Trajectory> traj;
  for (auto& j : jobs) traj.push_back(j.get());

  std::ostringstream csv;
  csv << cfg.sweep.parameter << ",final_t_minutes,final_s_mm,breakthrough,steps,min_alpha\n";
  std::vector<std::pair<std::string, PhysicalTrajectory>> curves;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto summary = trajectory_summary(traj[i], runs[i].params);
    csv << format_number(cfg.sweep.values[i]) << ','
        << format_number(summary["final_t_minutes"].get<double>()) << ','
        << format_number(summary["final_s_mm"].get<double>()) << ','
        << (traj[i].reached_breakthrough() ? 1 : 0) << ',' << traj[i].steps << ','
        << format_number(summary["min_alpha"].get<double>()) << '\n';
    curves.emplace_back(fmt::format("{} = {:g}", cfg.sweep.parameter, cfg.sweep.values[i]),
                        back_transform(traj[i], runs[i].params, 2));
    rows.push_back({{"value", cfg.sweep.values[i]},
                    {"summary", summary},
                    {"events", events_json(traj[i].events)}});
    log << fmt::format("sweep: {} = {:g}: s(T) = {:.6g} mm\n", cfg.sweep.parameter,
                       cfg.sweep.values[i], summary["final_s_mm"].get<double>());
  }
  Artifacts art{cfg.out_dir};
  art.write("sweep.csv", csv.str());
  art.write("sweep.svg", interface_svg(curves, nullptr));
  nlohmann::json m;
  m["tool"] = {{"name", "mbfem"}, {"version", kVersion}, {"mode", "sweep"}};
  m["config"] = cfg.to_json();
  m["runs"] = rows;
  m["checksums"] = art.checksums;
  write_text_file(cfg.out_dir / "sweep_manifest.json", m.dump(2) + "\n");
  return m;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  auto fail = [&](int code, const std::string& kind, const std::string& message,
                  nlohmann::json extra = nullptr) {
    nlohmann::json e{{"kind", kind}, {"message", message}, {"exit_code", code}};
    if (!extra.is_null()) e["details"] = std::move(extra);
    err << nlohmann::json{{"error", e}}.dump() << '\n';
    return code;
  };

  CLI::App app{"Moving-boundary diffusion solver (Landau-transformed P1 finite elements)", "mbfem"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string preset_name, config_path, scheme, out_dir, norms, levels, experimental, parameter,
      values;
  std::size_t mesh_n = 0, reference_n = 0;
  double dt = 0.0, stride = 0.0, tf = 0.0;
  bool assert_orders = false, serial = false;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--preset", preset_name, "built-in parameter set (dense | foam)");
    sub->add_option("--config", config_path, "JSON or key = value configuration file")
        ->check(CLI::ExistingFile);
    sub->add_option("--mesh-n", mesh_n, "number of mesh nodes")->check(CLI::Range(3, 1 << 24));
    sub->add_option("--dt", dt, "time step [min]");
    sub->add_option("--scheme", scheme, "rk4 | rk45");
    sub->add_option("--output-stride", stride, "recording interval [min]");
    sub->add_option("--tf", tf, "final time [min]");
    sub->add_option("--out", out_dir, "output directory");
  };
  CLI::App* sim = app.add_subcommand("simulate", "single run with trajectory and plots");
  common(sim);
  sim->add_option("--experimental", experimental, "CSV of measured (t [min], s [mm]) for overlay");
  CLI::App* study = app.add_subcommand("study", "mesh-refinement convergence study");
  common(study);
  study->add_option("--reference-n", reference_n, "reference mesh nodes");
  study->add_option("--levels", levels, "comma-separated node counts, doubling");
  study->add_option("--norms", norms, "comma-separated subset of L2L2,L2H1,LinfL2,boundary_L2,boundary_deriv_L2");
  study->add_flag("--assert-orders", assert_orders, "exit 4 unless every order lies in its band");
  study->add_flag("--serial", serial, "solve the levels one after another");
  CLI::App* sweep = app.add_subcommand("sweep", "one-parameter sweep of single runs");
  common(sweep);
  sweep->add_option("--parameter", parameter, "physical parameter (D, beta, H, a0, s0, L, m0, Tf)");
  sweep->add_option("--values", values, "comma-separated parameter values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << '\n';
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    return fail(exit_config, "usage", e.what());
  }

  try {
    nlohmann::json j = config_path.empty() ? nlohmann::json::object()
                                           : parse_config_text(read_text_file(config_path));
    if (!preset_name.empty()) j["preset"] = preset_name;
    RunConfig cfg = RunConfig::from_json(j);
    if (mesh_n) cfg.mesh.n = mesh_n;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (tf > 0.0) cfg.params.Tf = tf;
    else if (tf < 0.0) throw ConfigError("--tf must be positive");
    TimeSettings& ts = study->parsed() ? cfg.study.integrator : cfg.integrator;
    if (dt != 0.0) ts.dt_minutes = dt;
    if (stride != 0.0) ts.output_stride_minutes = stride;
    if (!scheme.empty()) ts.scheme = scheme_from_string(scheme);
    if (!experimental.empty()) cfg.experimental = experimental;

    if (sim->parsed()) {
      run_simulate(cfg, out);
      return exit_ok;
    }
    if (study->parsed()) {
      if (reference_n) cfg.study.reference_n = reference_n;
      if (!levels.empty()) {
        cfg.study.meshes.clear();
        for (const auto& s : split_list(levels)) {
          try {
            cfg.study.meshes.push_back(static_cast<std::size_t>(std::stoul(s)));
          } catch (const std::exception&) {
            throw ConfigError("--levels: not a node count: " + s);
          }
        }
      }
      if (!norms.empty()) {
        cfg.study.norms.clear();
        for (const auto& s : split_list(norms)) cfg.study.norms.push_back(norm_from_string(s));
      }
      if (serial) cfg.study.parallel = false;
      StudyOutput res = run_study(cfg, out);
      if (assert_orders && !res.bands_passed) {
        nlohmann::json failed = nlohmann::json::array();
        for (const auto& b : res.bands)
          if (!b.passed)
            failed.push_back({{"norm", to_string(b.band.norm)},
                              {"coarse_n", res.report.rows[b.pair_index - 1].n},
                              {"fine_n", res.report.rows[b.pair_index].n},
                              {"order", std::isfinite(b.order) ? nlohmann::json(b.order)
                                                               : nlohmann::json(nullptr)},
                              {"lo", b.band.lo},
                              {"hi", std::isfinite(b.band.hi) ? nlohmann::json(b.band.hi)
                                                              : nlohmann::json(nullptr)}});
        return fail(exit_band, "order-band", "convergence orders outside acceptance bands", failed);
      }
      return exit_ok;
    }
    if (!parameter.empty()) cfg.sweep.parameter = parameter;
    if (!values.empty()) {
      cfg.sweep.values.clear();
      for (const auto& s : split_list(values)) {
        try {
          cfg.sweep.values.push_back(std::stod(s));
        } catch (const std::exception&) {
          throw ConfigError("--values: not a number: " + s);
        }
      }
    }
    run_sweep(cfg, out);
    return exit_ok;
  } catch (const ConfigError& e) {
    return fail(exit_config, "config", e.what());
  } catch (const SolverError& e) {
    return fail(exit_solver, "solver", e.what());
  } catch (const IoError& e) {
    return fail(exit_config, "io", e.what());
  } catch (const std::exception& e) {
    return fail(exit_solver, "internal", e.what());
  }
}

}  // namespace mbfem::cli
