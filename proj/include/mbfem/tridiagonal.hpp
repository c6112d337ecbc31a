#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mbfem {

/// Square tridiagonal matrix stored by diagonals.
/// lower[i] = A(i+1, i), diag[i] = A(i, i), upper[i] = A(i, i+1).
struct Tridiagonal {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;

  explicit Tridiagonal(std::size_t n = 0) : lower(n ? n - 1 : 0), diag(n), upper(n ? n - 1 : 0) {}

  std::size_t size() const { return diag.size(); }
  /// Zero outside the three diagonals.
  double operator()(std::size_t i, std::size_t j) const;
  /// out = A x (out and x must not alias).
  void multiply(std::span<const double> x, std::span<double> out) const;
  std::vector<double> multiply(std::span<const double> x) const;
  /// x^T A x
  double quadratic_form(std::span<const double> x) const;
  std::vector<std::vector<double>> to_dense() const;
};

/// Thomas-algorithm LU factorization (no pivoting; intended for the
/// symmetric positive definite mass matrix).
class TridiagonalLU {
 public:
  TridiagonalLU() = default;
  explicit TridiagonalLU(const Tridiagonal& a);

  /// Solves A x = rhs in place.
  void solve_in_place(std::span<double> rhs) const;
  std::size_t size() const { return inv_pivot_.size(); }

 private:
  std::vector<double> lower_;      // sub-diagonal of A
  std::vector<double> upper_mod_;  // c'_i = c_i / pivot_i
  std::vector<double> inv_pivot_;
};

}  // namespace mbfem
