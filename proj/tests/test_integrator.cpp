#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mbfem/config.hpp"
#include "mbfem/error.hpp"
#include "mbfem/integrator.hpp"

using namespace mbfem;

namespace {

DimensionlessParams simple(double Bi, double A0, double b, double sigma, double h0, double T) {
  DimensionlessParams d;
  d.Bi = Bi;
  d.A0 = A0;
  d.h0 = h0;
  d.T = T;
  d.H = 1.0;
  d.b_dimless = CoefficientFunction::constant(b);
  d.sigma_dimless = CoefficientFunction::constant(sigma);
  return d;
}

IntegratorConfig rk4(double dt, double stride) {
  IntegratorConfig c;
  c.scheme = Scheme::rk4;
  c.dt = dt;
  c.output_stride = stride;
  return c;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_SUITE("integrator") {

TEST_CASE("no flux and no kinetics: constant state is preserved") {
  const auto p = simple(0.0, 0.0, 0.0, 0.0, 0.3, 0.5);
  const auto traj = solve(p, std::make_shared<Mesh>(Mesh::uniform(11)),
                          InitialCondition::constant(0.7), rk4(1e-3, 0.1));
  REQUIRE(traj.size() == 6);
  for (const auto& s : traj.states) {
    CHECK(s.h == p.h0);
    for (double a : s.alpha) CHECK(a == doctest::Approx(0.7).epsilon(1e-14));
  }
  CHECK(traj.back().tau == p.T);
  CHECK(traj.events.back().kind == Event::Kind::completion);
}

TEST_CASE("frozen interface: uptake toward b/H from below") {
  auto p = simple(2.0, 0.0, 1.5, 0.0, 0.5, 6.0);
  p.H = 1.5;
  const auto ops = assemble(std::make_shared<Mesh>(Mesh::uniform(3)));
  const auto traj = solve(p, ops, InitialCondition::constant(0.2), rk4(1e-3, 0.05));
  double prev_mass = 0.0;
  for (std::size_t n = 0; n < traj.size(); ++n) {
    const auto& s = traj.states[n];
    CHECK(s.h == p.h0);
    double mass = 0.0;
    for (double v : ops.mass.multiply(s.alpha)) mass += v;
    if (n > 0) {
      CHECK(mass > prev_mass);
      CHECK(s.alpha[0] >= traj.states[n - 1].alpha[0]);
    }
    prev_mass = mass;
    for (double a : s.alpha) CHECK(a <= 1.0 + 1e-12);
  }
  for (double a : traj.back().alpha) CHECK(a == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("equilibrium data stay at equilibrium") {
  // u0 = b/H everywhere and sigma = b/H: no flux, no interface motion.
  auto p = simple(5.0, 3.0, 0.8, 0.4, 0.2, 0.2);
  p.H = 2.0;
  const auto traj = solve(p, std::make_shared<Mesh>(Mesh::uniform(21)),
                          InitialCondition::constant(0.4), rk4(1e-3, 0.05));
  for (double a : traj.back().alpha) CHECK(std::abs(a - 0.4) <= 1e-8);
  CHECK(std::abs(traj.back().h - p.h0) <= 1e-10);
}

TEST_CASE("classical RK4 step converges at fourth order") {
  auto p = nondimensionalize(preset("dense").params);
  const auto ops = assemble(std::make_shared<Mesh>(Mesh::uniform(20)));
  const auto u0 = InitialCondition::constant(1.0);
  SolverState s0;
  s0.alpha = initial_coefficients(ops, u0, InitialProjection::interpolation);
  s0.h = p.h0;
  s0.hprime = interface_velocity(s0.alpha.back(), s0.h, p);
  const SemiDiscreteSystem sys(ops, p);
  const double dt0 = 0.25 * sys.stable_step(s0, 0.9);
  const double horizon = 16 * dt0;

  auto run = [&](int m) {
    SolverState s = s0;
    const double dt = horizon / m;
    for (int i = 0; i < m; ++i) s = step(s, dt, ops, p);
    return s;
  };
  const auto ref = run(16 * 32);
  std::vector<double> errs;
  for (int m : {16, 32, 64}) {
    const auto s = run(m);
    errs.push_back(std::max(max_abs_diff(s.alpha, ref.alpha), std::abs(s.h - ref.h)));
  }
  for (std::size_t i = 1; i < errs.size(); ++i)
    CHECK(std::log2(errs[i - 1] / errs[i]) == doctest::Approx(4.0).epsilon(0.3 / 4.0));
}

TEST_CASE("capped fixed step stays stable on the foam preset") {
  // The interface value drops toward zero in the first steps here, leaving
  // the kinetic coupling through the convection term as the stiffest mode.
  auto c = RunConfig::from_preset("foam");
  c.params.Tf = 0.5;
  const auto p = nondimensionalize(c.params);
  auto ic = c.study.integrator.to_integrator(c.params);
  for (std::size_t n : {20, 40}) {
    const auto traj = solve(p, std::make_shared<Mesh>(Mesh::uniform(n)), c.initial, ic);
    CHECK(traj.back().tau == p.T);
    for (const auto& s : traj.states) {
      CHECK(*std::min_element(s.alpha.begin(), s.alpha.end()) >= -1e-10);
      CHECK(s.h >= p.h0);
    }
  }
}

TEST_CASE("adaptive and fixed schemes agree") {
  auto p = nondimensionalize(preset("dense").params);
  p.T *= 0.25;
  auto mesh = std::make_shared<Mesh>(Mesh::uniform(20));
  const auto u0 = InitialCondition::constant(1.0);
  const auto a = solve(p, mesh, u0, rk4(1e-5, p.T / 4));
  IntegratorConfig c;
  c.scheme = Scheme::rk45;
  c.dt = 1e-6;
  c.rel_tol = 1e-10;
  c.abs_tol = 1e-12;
  c.output_stride = p.T / 4;
  const auto b = solve(p, mesh, u0, c);
  REQUIRE(a.size() == b.size());
  CHECK(b.rejected_steps + b.steps < a.steps);
  CHECK(a.back().h == doctest::Approx(b.back().h).epsilon(1e-7));
  CHECK(max_abs_diff(a.back().alpha, b.back().alpha) < 1e-6);
}

TEST_CASE("interface reaching the far face stops the run") {
  auto p = simple(1.0, 50.0, 1.0, 0.0, 0.8, 10.0);
  const auto traj = solve(p, std::make_shared<Mesh>(Mesh::uniform(11)),
                          InitialCondition::constant(1.0), rk4(1e-4, 0.1));
  REQUIRE(traj.reached_breakthrough());
  CHECK(traj.back().h < 1.0);
  CHECK(traj.back().h > 1.0 - 1e-8);
  CHECK(traj.back().tau < p.T);
  for (std::size_t n = 1; n < traj.size(); ++n) CHECK(traj.states[n].h > traj.states[n - 1].h);
}

TEST_CASE("violation policy: abort throws, record keeps going") {
  const auto p = simple(1.0, 0.0, 2.0, 0.0, 0.5, 1.0);
  auto mesh = std::make_shared<Mesh>(Mesh::uniform(6));
  auto c = rk4(1e-3, 0.25);
  c.concentration_bound = 0.5;  // data start at 0.4, inflow pushes past 0.5
  CHECK_THROWS_AS(solve(p, mesh, InitialCondition::constant(0.4), c), SolverError);
  c.on_violation = ViolationPolicy::record;
  const auto traj = solve(p, mesh, InitialCondition::constant(0.4), c);
  CHECK(traj.back().tau == p.T);
  const auto n = std::count_if(traj.events.begin(), traj.events.end(), [](const Event& e) {
    return e.kind == Event::Kind::invariant_violation;
  });
  CHECK(n == 1);
}

TEST_CASE("energy diagnostic on trivial dynamics") {
  const auto p = simple(0.0, 0.0, 0.0, 0.0, 0.3, 0.4);
  const auto ops = assemble(std::make_shared<Mesh>(Mesh::uniform(9)));
  const auto e1 = energy_diagnostic(solve(p, ops, InitialCondition::constant(1.5), rk4(1e-3, 0.1)), ops);
  const auto e2 = energy_diagnostic(solve(p, ops, InitialCondition::constant(3.0), rk4(1e-3, 0.1)), ops);
  CHECK(e1.max_l2_sq == doctest::Approx(2.25).epsilon(1e-13));
  CHECK(e1.int_h1_semi_sq == doctest::Approx(0.0));
  CHECK(e2.max_l2_sq == doctest::Approx(4.0 * e1.max_l2_sq).epsilon(1e-13));
}

TEST_CASE("initial projections") {
  const auto ops = assemble(std::make_shared<Mesh>(Mesh::graded(12, 0.9)));
  for (auto mode : {InitialProjection::interpolation, InitialProjection::l2}) {
    const auto a = initial_coefficients(ops, InitialCondition::affine(0.5, 2.0), mode);
    for (std::size_t i = 0; i < a.size(); ++i)
      CHECK(a[i] == doctest::Approx(0.5 + 2.0 * ops.mesh->node(i)).epsilon(1e-12));
  }
}

TEST_CASE("configuration errors") {
  const auto p = simple(1.0, 1.0, 1.0, 0.0, 0.5, 1.0);
  auto mesh = std::make_shared<Mesh>(Mesh::uniform(5));
  auto c = rk4(0.0, 0.1);
  CHECK_THROWS_AS(solve(p, mesh, InitialCondition::constant(1.0), c), ConfigError);
  c = rk4(1e-3, -1.0);
  CHECK_THROWS_AS(solve(p, mesh, InitialCondition::constant(1.0), c), ConfigError);
  auto q = p;
  q.h0 = 1.2;
  CHECK_THROWS_AS(solve(q, mesh, InitialCondition::constant(1.0), rk4(1e-3, 0.1)), ConfigError);
  CHECK_THROWS_AS(scheme_from_string("euler"), ConfigError);
  CHECK(scheme_from_string("rk45") == Scheme::rk45);
}

}  // TEST_SUITE
