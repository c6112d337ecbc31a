#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "mbfem/error.hpp"
#include "mbfem/error_analysis.hpp"

using namespace mbfem;

namespace {

// Trajectory with the given nodal values and interface data at every sample.
Trajectory synthetic(std::shared_ptr<const Mesh> mesh, const std::vector<double>& times,
                     const std::function<double(double, double)>& u,
                     const std::function<double(double)>& h,
                     const std::function<double(double)>& hp) {
  Trajectory t;
  t.mesh = mesh;
  for (double tau : times) {
    SolverState s;
    s.tau = tau;
    for (double y : mesh->nodes()) s.alpha.push_back(u(tau, y));
    s.h = h(tau);
    s.hprime = hp(tau);
    t.times.push_back(tau);
    t.states.push_back(s);
    t.rhs_snapshots.push_back(std::vector<double>(mesh->size(), 0.0));
  }
  return t;
}

std::vector<double> grid(double T, int n) {
  std::vector<double> v;
  for (int i = 0; i <= n; ++i) v.push_back(T * i / n);
  return v;
}

std::shared_ptr<const Mesh> random_mesh(std::mt19937& rng, std::size_t n) {
  std::uniform_real_distribution<double> U(0.05, 1.0);
  std::vector<double> y{0.0};
  for (std::size_t i = 1; i < n; ++i) y.push_back(y.back() + U(rng));
  for (auto& v : y) v /= y.back();
  y.back() = 1.0;
  return std::make_shared<Mesh>(Mesh::from_nodes(y));
}

double slope_at(const Mesh& m, std::span<const double> a, double y) {
  const auto e = m.locate(y);
  return (a[e + 1] - a[e]) / m.element_size(e);
}

}  // namespace

TEST_SUITE("error_analysis") {

TEST_CASE("identical trajectories have zero error in every norm") {
  auto mesh = std::make_shared<Mesh>(Mesh::uniform(9));
  auto t = synthetic(mesh, grid(0.5, 10), [](double s, double y) { return std::sin(y + s); },
                     [](double s) { return 0.1 + s; }, [](double) { return 1.0; });
  for (auto k : all_norms()) CHECK(discrete_error(t, t, k) == 0.0);
  CHECK(true_squared_error(t, t) == 0.0);
}

TEST_CASE("constant offsets give closed-form norms") {
  const double T = 0.36, d = 0.03, eps = 2e-4, eps_p = 5e-3;
  auto coarse_mesh = std::make_shared<Mesh>(Mesh::uniform(11));
  auto fine_mesh = std::make_shared<Mesh>(Mesh::uniform(33));
  const auto times = grid(T, 12);
  auto c = synthetic(coarse_mesh, times, [](double, double) { return 1.0; },
                     [](double s) { return 0.1 + s; }, [](double) { return 1.0; });
  auto r = synthetic(fine_mesh, times, [d](double, double) { return 1.0 + d; },
                     [eps](double s) { return 0.1 + s + eps; },
                     [eps_p](double) { return 1.0 + eps_p; });
  for (auto q : {SpatialQuadrature::nodal, SpatialQuadrature::exact}) {
    NormOptions o{q, GradientComparison::exact};
    CHECK(discrete_error(c, r, NormKind::l2_l2, o) == doctest::Approx(d * std::sqrt(T)));
    CHECK(discrete_error(c, r, NormKind::l2_h1, o) == doctest::Approx(d * std::sqrt(T)));
    CHECK(discrete_error(c, r, NormKind::linf_l2, o) == doctest::Approx(d));
  }
  CHECK(discrete_error(c, r, NormKind::boundary_l2) == doctest::Approx(eps * std::sqrt(T)));
  CHECK(discrete_error(c, r, NormKind::boundary_deriv_l2) == doctest::Approx(eps_p * std::sqrt(T)));
  CHECK(true_squared_error(c, r) == doctest::Approx(d * d + eps * eps));
}

TEST_CASE("exact gradient comparison matches brute-force quadrature on unrelated meshes") {
  std::mt19937 rng(8);
  auto cm = random_mesh(rng, 9);
  auto fm = random_mesh(rng, 37);
  auto f = [](double, double y) { return std::exp(y) * std::cos(3.0 * y); };
  const auto times = grid(1.0, 1);
  auto c = synthetic(cm, times, f, [](double) { return 0.5; }, [](double) { return 0.0; });
  auto r = synthetic(fm, times, f, [](double) { return 0.5; }, [](double) { return 0.0; });
  const int n = 400000;
  double l2 = 0.0, h1 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double y = (i + 0.5) / n;
    const double du = eval_piecewise_linear(*cm, c.states[0].alpha, y) -
                      eval_piecewise_linear(*fm, r.states[0].alpha, y);
    const double dg = slope_at(*cm, c.states[0].alpha, y) - slope_at(*fm, r.states[0].alpha, y);
    l2 += du * du / n;
    h1 += dg * dg / n;
  }
  const NormOptions o{SpatialQuadrature::exact, GradientComparison::exact};
  CHECK(discrete_error(c, r, NormKind::l2_l2, o) == doctest::Approx(std::sqrt(l2)).epsilon(1e-6));
  CHECK(discrete_error(c, r, NormKind::l2_h1, o) ==
        doctest::Approx(std::sqrt(l2 + h1)).epsilon(1e-4));
  CHECK(true_squared_error(c, r) == doctest::Approx(l2 + h1).epsilon(1e-4));
}

TEST_CASE("norms are absolutely homogeneous in the error") {
  auto cm = std::make_shared<Mesh>(Mesh::uniform(6));
  auto fm = std::make_shared<Mesh>(Mesh::uniform(21));
  const auto times = grid(0.2, 8);
  auto base = [](double s, double y) { return 1.0 + s * y; };
  auto c = synthetic(cm, times, base, [](double s) { return 0.2 + s; }, [](double) { return 1.0; });
  auto make_ref = [&](double lam) {
    return synthetic(
        fm, times, [&, lam](double s, double y) { return base(s, y) + lam * std::sin(7 * y + s); },
        [lam](double s) { return 0.2 + s + lam * s * s; },
        [lam](double s) { return 1.0 + lam * 2 * s; });
  };
  const auto r1 = make_ref(1e-3), r2 = make_ref(-3e-3);
  for (auto k : all_norms())
    CHECK(discrete_error(c, r2, k) == doctest::Approx(3.0 * discrete_error(c, r1, k)).epsilon(1e-10));
}

TEST_CASE("input validation") {
  auto cm = std::make_shared<Mesh>(Mesh::uniform(6));
  auto fm = std::make_shared<Mesh>(Mesh::uniform(11));
  auto one = [](double, double) { return 1.0; };
  auto h = [](double) { return 0.5; };
  auto c = synthetic(cm, grid(1.0, 4), one, h, h);
  auto r = synthetic(fm, grid(1.0, 5), one, h, h);
  CHECK_THROWS_AS(discrete_error(c, r, NormKind::l2_l2), ConfigError);
  auto r2 = synthetic(fm, grid(1.0, 4), one, h, h);
  CHECK_THROWS_AS(discrete_error(r2, c, NormKind::l2_l2), ConfigError);
  CHECK_NOTHROW(discrete_error(c, r2, NormKind::l2_l2));

  CHECK(norm_from_string("l2h1") == NormKind::l2_h1);
  CHECK(to_string(NormKind::boundary_deriv_l2) == "boundary_deriv_L2");
  CHECK_THROWS_AS(norm_from_string("H2"), ConfigError);
  CHECK(std::isnan(convergence_order(0.0, 1.0)));
  CHECK(convergence_order(4.0, 1.0) == doctest::Approx(2.0));
}

TEST_CASE("study configuration rules") {
  StudyConfig s;
  CHECK_NOTHROW(s.validate());
  s.meshes = {20, 40, 100};
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.meshes = {20, 40, 80};
  s.reference_n = 80;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.reference_n = 300;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.reference_n = 320;
  CHECK_NOTHROW(s.validate());
  s.norms.clear();
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("estimator vanishes at equilibrium and scales with mesh size") {
  DimensionlessParams p;
  p.Bi = 4.0;
  p.A0 = 2.0;
  p.h0 = 0.3;
  p.T = 0.1;
  p.H = 2.0;
  p.b_dimless = CoefficientFunction::constant(1.0);
  p.sigma_dimless = CoefficientFunction::constant(0.5);
  IntegratorConfig cfg;
  cfg.scheme = Scheme::rk4;
  cfg.dt = 1e-4;
  cfg.output_stride = 0.02;
  const auto ops = assemble(std::make_shared<Mesh>(Mesh::uniform(11)));
  const auto eq = solve(p, ops, InitialCondition::constant(0.5), cfg);
  CHECK(aposteriori_estimate(eq, ops, p, InitialCondition::constant(0.5)).eta_total < 1e-18);

  p.b_dimless = CoefficientFunction::constant(2.0);
  p.sigma_dimless = CoefficientFunction::constant(0.4);
  const auto est = aposteriori_estimate(solve(p, ops, InitialCondition::constant(0.5), cfg), ops, p,
                                        InitialCondition::constant(0.5));
  CHECK(est.eta_total > 0.0);
  double sum = 0.0;
  for (double v : est.per_element) sum += v;
  CHECK(sum == doctest::Approx(est.residual_part + est.initial_data_part));
  CHECK(est.eta_total == doctest::Approx(sum + est.initial_interface));
}

TEST_CASE("report bands and CSV layout") {
  ErrorReport rep;
  rep.norms = {NormKind::l2_l2, NormKind::boundary_l2};
  rep.reference_n = 80;
  for (std::size_t n : {10, 20, 40}) {
    StudyRow row;
    row.n = n;
    row.k = 1.0 / (n - 1);
    row.error[NormKind::l2_l2] = 1.0 / (n * n);
    row.error[NormKind::boundary_l2] = 1.0 / n;
    rep.rows.push_back(row);
  }
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    for (auto k : rep.norms)
      rep.rows[i].order[k] = convergence_order(rep.rows[i - 1].error[k], rep.rows[i].error[k]);
  const auto res = rep.check({{NormKind::l2_l2, 1.0, std::numeric_limits<double>::infinity()},
                              {NormKind::boundary_l2, 0.8, 1.3},
                              {NormKind::l2_l2, 0.8, 1.3}});
  REQUIRE(res.size() == 6);
  CHECK(res[0].passed);
  CHECK(res[2].passed);
  CHECK_FALSE(res[4].passed);
  CHECK(res[4].order == doctest::Approx(2.0));
  const auto csv = rep.to_csv();
  CHECK(csv.substr(0, csv.find('\n')) ==
        "N,k,err_L2L2,order_L2L2,err_boundary_L2,order_boundary_L2,eta,true_error_sq,effectivity");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

}  // TEST_SUITE
