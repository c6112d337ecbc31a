#pragma once

#include <array>
#include <cstddef>
#include <span>

namespace mbfem {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::span<const double> points;
  std::span<const double> weights;
};

/// Rules with 1..5 points; 5 points integrate polynomials up to degree 9 exactly.
GaussRule gauss_legendre(std::size_t n_points);

/// Integrates f over [a, b] with an n-point rule.
template <class F>
double integrate(F&& f, double a, double b, std::size_t n_points = 5) {
  const auto rule = gauss_legendre(n_points);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.points.size(); ++q)
    sum += rule.weights[q] * f(mid + half * rule.points[q]);
  return half * sum;
}

}  // namespace mbfem
