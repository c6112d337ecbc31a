#pragma once

#include <memory>
#include <span>
#include <vector>

#include "mbfem/mesh.hpp"
#include "mbfem/model.hpp"
#include "mbfem/tridiagonal.hpp"

namespace mbfem {

/// Galerkin matrices on a fixed mesh. Row index = test function, column = trial.
///   mass(j, i)       = int phi_i phi_j
///   convection(j, i) = int y phi_i' phi_j
///   stiffness(j, i)  = int phi_i' phi_j'
struct FemOperators {
  std::shared_ptr<const Mesh> mesh;
  Tridiagonal mass;
  Tridiagonal convection;
  Tridiagonal stiffness;
  TridiagonalLU mass_lu;

  std::size_t size() const { return mass.size(); }
};

FemOperators assemble(std::shared_ptr<const Mesh> mesh);

/// Robin influx (1/h) Bi (b(tau) - H u(0)) loaded at node 0.
double boundary_influx(const DimensionlessParams& p, double tau, double u_at_0, double h);
/// Outflux (h'/h) u(1) loaded (with minus sign) at node N-1.
double boundary_outflux(double h, double hprime, double u_at_1);

/// h' = A0 (u(1) - sigma(h)/m0), sigma already dimensionless.
double interface_velocity(double u_at_1, double h, const DimensionlessParams& p);

/// Load vector F of M alpha' = F:
///   F = (h'/h) K alpha - (1/h^2) A alpha + influx e_0 - (h'/h) alpha_{N-1} e_{N-1}.
/// Throws SolverError when h <= 0.
void apply_rhs(const FemOperators& ops, std::span<const double> alpha, double h, double hprime,
               double tau, const DimensionlessParams& p, std::span<double> out);
std::vector<double> apply_rhs(const FemOperators& ops, std::span<const double> alpha, double h,
                              double hprime, double tau, const DimensionlessParams& p);

/// Snapshot of the semi-discrete solution together with its exact time derivative.
struct ResidualInput {
  std::span<const double> alpha;
  std::span<const double> alpha_dot;
  double h = 0.0;
  double hprime = 0.0;
  double tau = 0.0;
};

/// Elementwise ||R(u_k)||^2_{L^2(I_i)} with
///   R = (h'/h) y u_k' + (1/h) Bi (b - H u_k(0)) - (h'/h) u_k(1) - du_k/dtau.
/// R is affine on each element, so the integral is evaluated in closed form.
std::vector<double> residual(const FemOperators& ops, const ResidualInput& in,
                             const DimensionlessParams& p);

}  // namespace mbfem
