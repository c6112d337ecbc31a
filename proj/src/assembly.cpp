#include "mbfem/assembly.hpp"

#include <cmath>

#include "mbfem/error.hpp"

namespace mbfem {

FemOperators assemble(std::shared_ptr<const Mesh> mesh) {
  const std::size_t n = mesh->size();
  FemOperators ops{mesh, Tridiagonal(n), Tridiagonal(n), Tridiagonal(n), {}};
  for (std::size_t e = 0; e < mesh->element_count(); ++e) {
    const double a = mesh->node(e);
    const double b = mesh->node(e + 1);
    const double k = b - a;

    // mass: k/6 [[2, 1], [1, 2]]
    ops.mass.diag[e] += k / 3.0;
    ops.mass.diag[e + 1] += k / 3.0;
    ops.mass.upper[e] += k / 6.0;
    ops.mass.lower[e] += k / 6.0;

    // stiffness: 1/k [[1, -1], [-1, 1]]
    ops.stiffness.diag[e] += 1.0 / k;
    ops.stiffness.diag[e + 1] += 1.0 / k;
    ops.stiffness.upper[e] -= 1.0 / k;
    ops.stiffness.lower[e] -= 1.0 / k;

    // convection: phi_i' is -1/k (left) or +1/k (right); int y phi_a = k(2a+b)/6,
    // int y phi_b = k(a+2b)/6, so row a is (2a+b)/6 [-1, 1], row b is (a+2b)/6 [-1, 1].
    const double wa = (2.0 * a + b) / 6.0;
    const double wb = (a + 2.0 * b) / 6.0;
    ops.convection.diag[e] -= wa;
    ops.convection.upper[e] += wa;
    ops.convection.lower[e] -= wb;
    ops.convection.diag[e + 1] += wb;
  }
  ops.mass_lu = TridiagonalLU(ops.mass);
  return ops;
}

double boundary_influx(const DimensionlessParams& p, double tau, double u_at_0, double h) {
  return p.Bi * (p.b_dimless(tau) - p.H * u_at_0) / h;
}

double boundary_outflux(double h, double hprime, double u_at_1) { return hprime / h * u_at_1; }

double interface_velocity(double u_at_1, double h, const DimensionlessParams& p) {
  return p.A0 * (u_at_1 - p.sigma_dimless(h));
}

void apply_rhs(const FemOperators& ops, std::span<const double> alpha, double h, double hprime,
               double tau, const DimensionlessParams& p, std::span<double> out) {
  if (!(h > 0.0)) throw SolverError("interface collapse: h = " + std::to_string(h));
  const std::size_t n = ops.size();
  const double conv = hprime / h;
  const double diff = 1.0 / (h * h);
  const auto& K = ops.convection;
  const auto& A = ops.stiffness;
  auto row = [&](std::size_t i, double kx, double ax) { out[i] = conv * kx - diff * ax; };
  row(0, K.diag[0] * alpha[0] + K.upper[0] * alpha[1], A.diag[0] * alpha[0] + A.upper[0] * alpha[1]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double kx = K.lower[i - 1] * alpha[i - 1] + K.diag[i] * alpha[i] + K.upper[i] * alpha[i + 1];
    const double ax = A.lower[i - 1] * alpha[i - 1] + A.diag[i] * alpha[i] + A.upper[i] * alpha[i + 1];
    row(i, kx, ax);
  }
  row(n - 1, K.lower[n - 2] * alpha[n - 2] + K.diag[n - 1] * alpha[n - 1],
      A.lower[n - 2] * alpha[n - 2] + A.diag[n - 1] * alpha[n - 1]);
  out[0] += boundary_influx(p, tau, alpha[0], h);
  out[n - 1] -= boundary_outflux(h, hprime, alpha[n - 1]);
}

std::vector<double> apply_rhs(const FemOperators& ops, std::span<const double> alpha, double h,
                              double hprime, double tau, const DimensionlessParams& p) {
  std::vector<double> out(ops.size());
  apply_rhs(ops, alpha, h, hprime, tau, p, out);
  return out;
}

std::vector<double> residual(const FemOperators& ops, const ResidualInput& in,
                             const DimensionlessParams& p) {
  if (!(in.h > 0.0)) throw SolverError("residual: h must be positive");
  const Mesh& mesh = *ops.mesh;
  const std::size_t n = mesh.size();
  const double conv = in.hprime / in.h;
  const double boundary =
      boundary_influx(p, in.tau, in.alpha[0], in.h) - boundary_outflux(in.h, in.hprime, in.alpha[n - 1]);
  std::vector<double> out(mesh.element_count());
  for (std::size_t e = 0; e < out.size(); ++e) {
    const double a = mesh.node(e);
    const double b = mesh.node(e + 1);
    const double k = b - a;
    const double slope = (in.alpha[e + 1] - in.alpha[e]) / k;
    const double ra = conv * a * slope + boundary - in.alpha_dot[e];
    const double rb = conv * b * slope + boundary - in.alpha_dot[e + 1];
    out[e] = k * (ra * ra + ra * rb + rb * rb) / 3.0;
  }
  return out;
}

}  // namespace mbfem
