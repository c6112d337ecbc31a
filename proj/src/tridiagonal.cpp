#include "mbfem/tridiagonal.hpp"

#include <cmath>

#include "mbfem/error.hpp"

namespace mbfem {

double Tridiagonal::operator()(std::size_t i, std::size_t j) const {
  if (i == j) return diag[i];
  if (j == i + 1) return upper[i];
  if (i == j + 1) return lower[j];
  return 0.0;
}

void Tridiagonal::multiply(std::span<const double> x, std::span<double> out) const {
  const std::size_t n = diag.size();
  if (n == 1) {
    out[0] = diag[0] * x[0];
    return;
  }
  out[0] = diag[0] * x[0] + upper[0] * x[1];
  for (std::size_t i = 1; i + 1 < n; ++i)
    out[i] = lower[i - 1] * x[i - 1] + diag[i] * x[i] + upper[i] * x[i + 1];
  out[n - 1] = lower[n - 2] * x[n - 2] + diag[n - 1] * x[n - 1];
}

std::vector<double> Tridiagonal::multiply(std::span<const double> x) const {
  std::vector<double> out(diag.size());
  multiply(x, out);
  return out;
}

double Tridiagonal::quadratic_form(std::span<const double> x) const {
  const std::size_t n = diag.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = diag[i] * x[i];
    if (i > 0) row += lower[i - 1] * x[i - 1];
    if (i + 1 < n) row += upper[i] * x[i + 1];
    sum += x[i] * row;
  }
  return sum;
}

std::vector<std::vector<double>> Tridiagonal::to_dense() const {
  const std::size_t n = diag.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    d[i][i] = diag[i];
    if (i + 1 < n) {
      d[i][i + 1] = upper[i];
      d[i + 1][i] = lower[i];
    }
  }
  return d;
}

TridiagonalLU::TridiagonalLU(const Tridiagonal& a)
    : lower_(a.lower), upper_mod_(a.upper.size()), inv_pivot_(a.size()) {
  const std::size_t n = a.size();
  if (n == 0) return;
  double pivot = a.diag[0];
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) pivot = a.diag[i] - a.lower[i - 1] * upper_mod_[i - 1];
    if (!(std::abs(pivot) > 0.0) || !std::isfinite(pivot))
      throw SolverError("tridiagonal factorization: zero pivot");
    inv_pivot_[i] = 1.0 / pivot;
    if (i + 1 < n) upper_mod_[i] = a.upper[i] * inv_pivot_[i];
  }
}

void TridiagonalLU::solve_in_place(std::span<double> rhs) const {
  const std::size_t n = inv_pivot_.size();
  rhs[0] *= inv_pivot_[0];
  for (std::size_t i = 1; i < n; ++i)
    rhs[i] = (rhs[i] - lower_[i - 1] * rhs[i - 1]) * inv_pivot_[i];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= upper_mod_[i] * rhs[i + 1];
}

}  // namespace mbfem
