#include "mbfem/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "mbfem/error.hpp"
#include "mbfem/quadrature.hpp"

namespace mbfem {
namespace {

// RK4 stability interval on the negative real axis.
constexpr double kRk4RealStability = 2.785;
// Breakthrough threshold on the reference interval.
constexpr double kBreakthrough = 1.0 - 1e-12;

std::string describe(const char* what, std::size_t index, double value, double tau) {
  std::ostringstream os;
  os.precision(17);
  os << what << " at component " << index << ": value " << value << " at tau = " << tau;
  return os.str();
}

void require_finite(const SolverState& s) {
  for (std::size_t i = 0; i < s.alpha.size(); ++i)
    if (!std::isfinite(s.alpha[i]))
      throw SolverError(describe("instability: non-finite alpha", i, s.alpha[i], s.tau));
  if (!std::isfinite(s.h))
    throw SolverError(describe("instability: non-finite interface h", 0, s.h, s.tau));
  if (!std::isfinite(s.hprime))
    throw SolverError(describe("instability: non-finite interface velocity", 0, s.hprime, s.tau));
}

/// Explicit Runge-Kutta stage machinery over the stacked unknown (alpha, h).
class Stepper {
 public:
  explicit Stepper(const SemiDiscreteSystem& sys) : sys_(sys), n_(sys.ops().size()) {
    for (auto& k : ka_) k.resize(n_);
    tmp_.resize(n_);
  }

  std::size_t evaluations() const { return evaluations_; }

  SolverState rk4(const SolverState& s, double dt) {
    eval(s.tau, s.alpha, s.h, 0);
    combine(s, dt, {{0.5}}, 1);
    eval(s.tau + 0.5 * dt, tmp_, tmp_h_, 1);
    combine(s, dt, {{0.0, 0.5}}, 2);
    eval(s.tau + 0.5 * dt, tmp_, tmp_h_, 2);
    combine(s, dt, {{0.0, 0.0, 1.0}}, 3);
    eval(s.tau + dt, tmp_, tmp_h_, 3);
    SolverState out;
    out.tau = s.tau + dt;
    out.alpha.resize(n_);
    for (std::size_t i = 0; i < n_; ++i)
      out.alpha[i] =
          s.alpha[i] + dt / 6.0 * (ka_[0][i] + 2.0 * ka_[1][i] + 2.0 * ka_[2][i] + ka_[3][i]);
    out.h = s.h + dt / 6.0 * (kh_[0] + 2.0 * kh_[1] + 2.0 * kh_[2] + kh_[3]);
    out.hprime = interface_velocity(out.alpha.back(), out.h, sys_.params());
    return out;
  }

  /// Dormand-Prince 5(4). Returns the weighted RMS error estimate.
  double dopri5(const SolverState& s, double dt, double rtol, double atol, SolverState& out) {
    static constexpr double c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
    static constexpr double a[7][6] = {
        {},
        {1.0 / 5},
        {3.0 / 40, 9.0 / 40},
        {44.0 / 45, -56.0 / 15, 32.0 / 9},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
        {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
    static constexpr double e[7] = {71.0 / 57600,  0.0,         -71.0 / 16695, 71.0 / 1920,
                                    -17253.0 / 339200, 22.0 / 525, -1.0 / 40};
    eval(s.tau, s.alpha, s.h, 0);
    for (int st = 1; st < 7; ++st) {
      std::array<double, 6> row{};
      for (int j = 0; j < st; ++j) row[static_cast<std::size_t>(j)] = a[st][j];
      combine6(s, dt, row, st);
      // A stage that pushes the interface through zero is a rejected step.
      if (!(tmp_h_ > 0.0) || !std::isfinite(tmp_h_)) return std::numeric_limits<double>::infinity();
      eval(s.tau + c[st] * dt, tmp_, tmp_h_, st);
    }
    // Stage 7 is evaluated at the 5th-order solution, which tmp_ now holds.
    out.tau = s.tau + dt;
    out.alpha.assign(tmp_.begin(), tmp_.end());
    out.h = tmp_h_;
    out.hprime = interface_velocity(out.alpha.back(), out.h, sys_.params());

    double sum = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      double err = 0.0;
      for (int st = 0; st < 7; ++st) err += e[st] * ka_[static_cast<std::size_t>(st)][i];
      err *= dt;
      const double sc = atol + rtol * std::max(std::abs(s.alpha[i]), std::abs(out.alpha[i]));
      sum += (err / sc) * (err / sc);
    }
    {
      double err = 0.0;
      for (int st = 0; st < 7; ++st) err += e[st] * kh_[static_cast<std::size_t>(st)];
      err *= dt;
      const double sc = atol + rtol * std::max(std::abs(s.h), std::abs(out.h));
      sum += (err / sc) * (err / sc);
    }
    return std::sqrt(sum / static_cast<double>(n_ + 1));
  }

 private:
  void eval(double tau, std::span<const double> alpha, double h, int stage) {
    const auto st = static_cast<std::size_t>(stage);
    kh_[st] = sys_.derivative(tau, alpha, h, ka_[st]);
    ++evaluations_;
  }

  // tmp = s + dt * sum_j w[j] k_j for j < count
  void combine(const SolverState& s, double dt, std::array<double, 3> w, int count) {
    for (std::size_t i = 0; i < n_; ++i) {
      double acc = 0.0;
      for (int j = 0; j < count; ++j) acc += w[static_cast<std::size_t>(j)] * ka_[static_cast<std::size_t>(j)][i];
      tmp_[i] = s.alpha[i] + dt * acc;
    }
    double acc = 0.0;
    for (int j = 0; j < count; ++j) acc += w[static_cast<std::size_t>(j)] * kh_[static_cast<std::size_t>(j)];
    tmp_h_ = s.h + dt * acc;
  }

  void combine6(const SolverState& s, double dt, const std::array<double, 6>& w, int count) {
    for (std::size_t i = 0; i < n_; ++i) {
      double acc = 0.0;
      for (int j = 0; j < count; ++j) acc += w[static_cast<std::size_t>(j)] * ka_[static_cast<std::size_t>(j)][i];
      tmp_[i] = s.alpha[i] + dt * acc;
    }
    double acc = 0.0;
    for (int j = 0; j < count; ++j) acc += w[static_cast<std::size_t>(j)] * kh_[static_cast<std::size_t>(j)];
    tmp_h_ = s.h + dt * acc;
  }

  const SemiDiscreteSystem& sys_;
  std::size_t n_;
  std::array<std::vector<double>, 7> ka_;
  std::array<double, 7> kh_{};
  std::vector<double> tmp_;
  double tmp_h_ = 0.0;
  std::size_t evaluations_ = 0;
};

double default_concentration_bound(const DimensionlessParams& p, const InitialCondition& u0) {
  double m = 0.0;
  for (int i = 0; i <= 100; ++i) m = std::max(m, u0(i / 100.0));
  for (int i = 0; i <= 200; ++i) m = std::max(m, p.b_dimless(p.T * i / 200.0) / p.H);
  return 2.0 * m;
}

}  // namespace

std::string to_string(Scheme s) { return s == Scheme::rk4 ? "rk4" : "rk45"; }

Scheme scheme_from_string(const std::string& s) {
  if (s == "rk4" || s == "fixed-rk4") return Scheme::rk4;
  if (s == "rk45" || s == "adaptive-rk45") return Scheme::rk45;
  throw ConfigError("unknown scheme \"" + s + "\" (expected rk4 or rk45)");
}

std::string to_string(Event::Kind k) {
  switch (k) {
    case Event::Kind::breakthrough: return "breakthrough";
    case Event::Kind::invariant_violation: return "invariant-violation";
    case Event::Kind::completion: return "completion";
  }
  return "unknown";
}

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("integrator: dt must be positive");
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
    throw ConfigError("integrator: tolerances must be positive");
  if (!(output_stride > 0.0) || !std::isfinite(output_stride))
    throw ConfigError("integrator: output stride must be positive");
  if (max_steps == 0) throw ConfigError("integrator: max_steps must be positive");
  if (!(stability_safety > 0.0 && stability_safety <= 1.0))
    throw ConfigError("integrator: stability_safety must lie in (0, 1]");
}

nlohmann::json IntegratorConfig::to_json() const {
  return {{"scheme", to_string(scheme)},
          {"dt", dt},
          {"rel_tol", rel_tol},
          {"abs_tol", abs_tol},
          {"output_stride", output_stride},
          {"max_steps", max_steps},
          {"initial", initial == InitialProjection::interpolation ? "interpolation" : "l2"},
          {"positivity_tol", positivity_tol},
          {"concentration_bound", concentration_bound},
          {"on_violation", on_violation == ViolationPolicy::abort ? "abort" : "record"},
          {"stability_safety", stability_safety}};
}

bool Trajectory::reached_breakthrough() const {
  return std::any_of(events.begin(), events.end(),
                     [](const Event& e) { return e.kind == Event::Kind::breakthrough; });
}

double SemiDiscreteSystem::derivative(double tau, std::span<const double> alpha, double h,
                                      std::span<double> alpha_dot) const {
  const double hp = interface_velocity(alpha.back(), h, params_);
  apply_rhs(ops_, alpha, h, hp, tau, params_, alpha_dot);
  ops_.mass_lu.solve_in_place(alpha_dot);
  return hp;
}

double SemiDiscreteSystem::stable_step(const SolverState& s, double safety) const {
  // Sum of per-mechanism bounds on the spectral radius of the Jacobian.
  // Element pair (A_e, M_e) has generalized eigenvalues {0, 12/k^2}; entries of
  // M_e^{-1} are bounded by 4/k.
  const Mesh& mesh = *ops_.mesh;
  const double h = s.h;
  const double kmin = mesh.k_min();
  const double k0 = mesh.element_size(0);
  const double kl = mesh.element_size(mesh.element_count() - 1);
  const double vel = std::abs(s.hprime) / h;
  const double delta = 1e-7 * std::max(1.0, h);
  const double dsigma =
      std::abs(params_.sigma_dimless(h + delta) - params_.sigma_dimless(h - delta)) / (2 * delta);
  // h' enters the convection term through alpha_{N-1}: a rank-one block
  // (A0/h) M^{-1} K alpha e_{N-1}^T, with |M^{-1} K alpha| <= 3 max|u_k'|.
  double max_slope = 0.0;
  for (std::size_t e = 0; e < mesh.element_count(); ++e)
    max_slope = std::max(max_slope, std::abs(s.alpha[e + 1] - s.alpha[e]) / mesh.element_size(e));
  const double lambda = 12.0 / (kmin * kmin * h * h) + 6.0 * vel / kmin +
                        3.0 * params_.A0 * max_slope / h +
                        4.0 * params_.Bi * params_.H / (k0 * h) + 4.0 * vel / kl +
                        4.0 * params_.A0 * std::abs(s.alpha.back()) / (kl * h) +
                        params_.A0 * dsigma;
  return safety * kRk4RealStability / lambda;
}

std::vector<double> initial_coefficients(const FemOperators& ops, const InitialCondition& u0,
                                         InitialProjection mode) {
  const Mesh& mesh = *ops.mesh;
  std::vector<double> alpha(mesh.size());
  if (mode == InitialProjection::interpolation) {
    for (std::size_t i = 0; i < alpha.size(); ++i) alpha[i] = u0(mesh.node(i));
  } else {
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
      const double a = mesh.node(e);
      const double b = mesh.node(e + 1);
      alpha[e] += integrate([&](double y) { return u0(y) * (b - y) / (b - a); }, a, b);
      alpha[e + 1] += integrate([&](double y) { return u0(y) * (y - a) / (b - a); }, a, b);
    }
    ops.mass_lu.solve_in_place(alpha);
  }
  for (std::size_t i = 0; i < alpha.size(); ++i)
    if (!std::isfinite(alpha[i]))
      throw ConfigError("initial condition is not finite at node " + std::to_string(i));
  return alpha;
}

SolverState step(const SolverState& state, double dt, const FemOperators& ops,
                 const DimensionlessParams& params) {
  SemiDiscreteSystem sys(ops, params);
  Stepper stepper(sys);
  auto out = stepper.rk4(state, dt);
  require_finite(out);
  return out;
}

Trajectory solve(const DimensionlessParams& params, std::shared_ptr<const Mesh> mesh,
                 const InitialCondition& u0, const IntegratorConfig& cfg) {
  const FemOperators ops = assemble(std::move(mesh));
  return solve(params, ops, u0, cfg);
}

Trajectory solve(const DimensionlessParams& params, const FemOperators& ops,
                 const InitialCondition& u0, const IntegratorConfig& cfg) {
  cfg.validate();
  if (!(params.T > 0.0)) throw ConfigError("solve: final time must be positive");
  if (!(params.h0 > 0.0 && params.h0 < 1.0)) throw ConfigError("solve: need 0 < h0 < 1");

  const SemiDiscreteSystem sys(ops, params);
  Stepper stepper(sys);
  const double bound = cfg.concentration_bound > 0.0 ? cfg.concentration_bound
                                                     : default_concentration_bound(params, u0);

  Trajectory traj;
  traj.mesh = ops.mesh;
  traj.output_stride = cfg.output_stride;

  std::vector<double> scratch(ops.size());
  auto record = [&](const SolverState& s) {
    sys.derivative(s.tau, s.alpha, s.h, scratch);
    traj.times.push_back(s.tau);
    traj.states.push_back(s);
    traj.rhs_snapshots.push_back(scratch);
  };

  std::set<std::string> reported;
  auto violation = [&](const std::string& kind, const std::string& msg, double tau) {
    if (cfg.on_violation == ViolationPolicy::abort)
      throw SolverError("invariant violation (" + kind + "): " + msg);
    if (reported.insert(kind).second)
      traj.events.push_back({Event::Kind::invariant_violation, tau, kind + ": " + msg});
  };
  auto check_invariants = [&](const SolverState& s) {
    for (std::size_t i = 0; i < s.alpha.size(); ++i) {
      if (s.alpha[i] < -cfg.positivity_tol)
        violation("positivity", describe("negative concentration", i, s.alpha[i], s.tau), s.tau);
      if (s.alpha[i] > bound)
        violation("upper-bound", describe("concentration above M1", i, s.alpha[i], s.tau), s.tau);
    }
    if (s.h < params.h0 * (1.0 - 1e-12))
      violation("interface-retreat", describe("h below h0", 0, s.h, s.tau), s.tau);
  };

  SolverState state;
  state.tau = 0.0;
  state.alpha = initial_coefficients(ops, u0, cfg.initial);
  state.h = params.h0;
  state.hprime = interface_velocity(state.alpha.back(), state.h, params);
  require_finite(state);
  record(state);

  const double T = params.T;
  const auto n_samples =
      static_cast<std::size_t>(std::max(1.0, std::ceil(T / cfg.output_stride - 1e-9)));
  auto sample_time = [&](std::size_t n) {
    return n >= n_samples ? T : static_cast<double>(n) * cfg.output_stride;
  };

  auto advance = [&](const SolverState& s, double dt) {
    if (cfg.scheme == Scheme::rk4) return stepper.rk4(s, dt);
    SolverState out;
    stepper.dopri5(s, dt, cfg.rel_tol, cfg.abs_tol, out);
    return out;
  };

  // Shrinks the last step so the interface stops just below y = 1.
  auto land_on_breakthrough = [&](const SolverState& s, double dt) {
    double lo = 0.0;
    double hi = dt;
    SolverState best = s;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      SolverState trial = advance(s, mid);
      if (trial.h >= kBreakthrough) {
        hi = mid;
      } else {
        lo = mid;
        best = std::move(trial);
        if (best.h >= kBreakthrough - 1e-10) break;
      }
    }
    return best;
  };

  double dt_proposal = cfg.scheme == Scheme::rk45
                           ? std::min(cfg.dt, sys.stable_step(state, cfg.stability_safety))
                           : cfg.dt;
  std::size_t n = 1;
  while (n <= n_samples) {
    const double target = sample_time(n);
    const double remaining = target - state.tau;
    double dt = 0.0;
    bool landing = false;
    if (cfg.scheme == Scheme::rk4) {
      const double dmax = std::min(cfg.dt, sys.stable_step(state, cfg.stability_safety));
      const double m = std::max(1.0, std::ceil(remaining / dmax - 1e-9));
      dt = remaining / m;
      landing = (m == 1.0);
    } else {
      dt = dt_proposal;
      if (dt >= remaining * (1.0 - 1e-12) || remaining - dt < 1e-3 * dt) {
        dt = remaining;
        landing = true;
      }
    }

    SolverState next;
    if (cfg.scheme == Scheme::rk4) {
      next = stepper.rk4(state, dt);
    } else {
      const double err = stepper.dopri5(state, dt, cfg.rel_tol, cfg.abs_tol, next);
      bool finite = std::isfinite(err) && std::isfinite(next.h);
      const double fac =
          finite ? std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0) : 0.2;
      if (!finite || err > 1.0) {
        ++traj.rejected_steps;
        dt_proposal = dt * std::min(fac, 0.9);
        if (dt_proposal < 1e-14 * std::max(T, 1e-300))
          throw SolverError("rk45: step size underflow at tau = " + std::to_string(state.tau));
        if (traj.steps + traj.rejected_steps > cfg.max_steps)
          throw SolverError("max_steps exceeded");
        continue;
      }
      if (!landing) dt_proposal = dt * fac;
      else dt_proposal = std::max(dt_proposal, dt * fac);
    }
    if (++traj.steps > cfg.max_steps) throw SolverError("max_steps exceeded");
    if (landing) next.tau = target;
    require_finite(next);

    if (next.h >= kBreakthrough) {
      SolverState final_state = land_on_breakthrough(state, dt);
      require_finite(final_state);
      check_invariants(final_state);
      record(final_state);
      traj.events.push_back({Event::Kind::breakthrough, final_state.tau,
                             "interface reached the far face of the slab"});
      traj.rhs_evaluations = stepper.evaluations();
      return traj;
    }
    check_invariants(next);
    state = std::move(next);
    if (landing) {
      record(state);
      ++n;
    }
  }
  traj.events.push_back({Event::Kind::completion, state.tau, "reached final time"});
  traj.rhs_evaluations = stepper.evaluations();
  return traj;
}

EnergyDiagnostic energy_diagnostic(const Trajectory& traj, const FemOperators& ops) {
  EnergyDiagnostic d;
  if (traj.empty()) return d;
  std::vector<double> a(traj.size());
  for (std::size_t j = 0; j < traj.size(); ++j) {
    d.max_l2_sq = std::max(d.max_l2_sq, ops.mass.quadratic_form(traj.states[j].alpha));
    a[j] = ops.stiffness.quadratic_form(traj.states[j].alpha);
  }
  for (std::size_t j = 1; j < traj.size(); ++j)
    d.int_h1_semi_sq += 0.5 * (traj.times[j] - traj.times[j - 1]) * (a[j] + a[j - 1]);
  return d;
}

}  // namespace mbfem
