#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mbfem/error.hpp"
#include "mbfem/mesh.hpp"

using namespace mbfem;

TEST_SUITE("mesh_basis") {

TEST_CASE("uniform mesh layout") {
  const auto m = Mesh::uniform(5);
  CHECK(m.size() == 5);
  CHECK(m.element_count() == 4);
  CHECK(m.node(0) == 0.0);
  CHECK(m.node(4) == 1.0);
  CHECK(m.element_size(2) == doctest::Approx(0.25));
  CHECK(m.k_max() == doctest::Approx(0.25));
  CHECK_THROWS_AS(Mesh::uniform(2), ConfigError);
}

TEST_CASE("from_nodes validation") {
  CHECK_NOTHROW(Mesh::from_nodes({0.0, 0.3, 1.0}));
  CHECK_THROWS_AS(Mesh::from_nodes({0.0, 0.5, 0.5, 1.0}), ConfigError);
  CHECK_THROWS_AS(Mesh::from_nodes({0.1, 0.5, 1.0}), ConfigError);
  CHECK_THROWS_AS(Mesh::from_nodes({0.0, 1.0}), ConfigError);
}

TEST_CASE("graded mesh: geometric sizes, exact endpoints") {
  const auto m = Mesh::graded(9, 0.8);
  CHECK(m.node(0) == 0.0);
  CHECK(m.node(8) == 1.0);
  for (std::size_t e = 1; e + 1 < m.element_count(); ++e)
    CHECK(m.element_size(e) / m.element_size(e - 1) == doctest::Approx(0.8).epsilon(1e-10));
}

TEST_CASE("locate: nodes belong to the element on their right, 1 to the last") {
  const auto m = Mesh::from_nodes({0.0, 0.2, 0.7, 1.0});
  CHECK(m.locate(0.0) == 0);
  CHECK(m.locate(0.2) == 1);
  CHECK(m.locate(0.69) == 1);
  CHECK(m.locate(1.0) == 2);
}

TEST_CASE("hat basis is a partition of unity and nodal") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> y{0.0};
  for (int i = 0; i < 12; ++i) y.push_back(y.back() + 0.05 + U(rng));
  for (auto& v : y) v /= y.back();
  const auto m = Mesh::from_nodes(y);
  for (int q = 0; q <= 200; ++q) {
    const double t = q / 200.0;
    double sum = 0.0, dsum = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      sum += hat(m, i, t);
      dsum += hat_derivative(m, i, t);
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(dsum) < 1e-10);
  }
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) CHECK(hat(m, i, m.node(j)) == (i == j ? 1.0 : 0.0));
}

TEST_CASE("nodal function evaluation and range check") {
  auto mesh = std::make_shared<Mesh>(Mesh::uniform(3));
  NodalFunction f(mesh, {1.0, 3.0, 2.0});
  CHECK(f.eval(0.25) == doctest::Approx(2.0));
  CHECK(f.eval(1.0) == 2.0);
  CHECK(f.slope(1) == doctest::Approx(-2.0));
  CHECK_THROWS_AS(f.eval(1.5), ConfigError);
  CHECK_THROWS_AS(NodalFunction(mesh, {1.0}), ConfigError);
}

TEST_CASE("interpolant reproduces linear functions exactly") {
  auto mesh = std::make_shared<Mesh>(Mesh::graded(17, 1.1));
  const auto I = interpolate([](double y) { return 2.0 - 3.0 * y; }, mesh);
  const auto e = interpolation_errors([](double y) { return 2.0 - 3.0 * y; },
                                      [](double) { return -3.0; }, I);
  CHECK(e.l2 < 1e-14);
  CHECK(e.h1_semi < 1e-13);
  CHECK_THROWS_AS(interpolate([](double) { return NAN; }, mesh), ConfigError);
}

TEST_CASE("interpolation rates for sin(pi y)") {
  const double pi = std::numbers::pi;
  auto f = [pi](double y) { return std::sin(pi * y); };
  auto df = [pi](double y) { return pi * std::cos(pi * y); };
  std::vector<InterpolationErrors> errs;
  for (std::size_t n : {11, 21, 41, 81}) {
    auto mesh = std::make_shared<Mesh>(Mesh::uniform(n));
    errs.push_back(interpolation_errors(f, df, interpolate(f, mesh)));
  }
  for (std::size_t i = 1; i < errs.size(); ++i) {
    CHECK(std::log2(errs[i - 1].l2 / errs[i].l2) == doctest::Approx(2.0).epsilon(0.05));
    CHECK(std::log2(errs[i - 1].h1_semi / errs[i].h1_semi) == doctest::Approx(1.0).epsilon(0.1));
  }
  // Classical constants: ||f - I f|| <= k^2/pi^2 ||f''||, |f - I f|_1 <= k/pi ||f''||
  const double f2 = pi * pi / std::sqrt(2.0);
  CHECK(errs[0].l2 <= 0.01 / (pi * pi) * f2);
  CHECK(errs[0].h1_semi <= 0.1 / pi * f2);
}

}  // TEST_SUITE
