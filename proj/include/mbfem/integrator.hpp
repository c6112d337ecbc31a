#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "mbfem/assembly.hpp"
#include "mbfem/mesh.hpp"
#include "mbfem/model.hpp"

namespace mbfem {

enum class Scheme { rk4, rk45 };
enum class InitialProjection { interpolation, l2 };
enum class ViolationPolicy { abort, record };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

/// All times are dimensionless (tau).
struct IntegratorConfig {
  Scheme scheme = Scheme::rk45;
  /// rk4: largest step; each step is further capped by an explicit stability
  /// bound so the stiff diffusion modes on fine meshes stay bounded.
  /// rk45: initial step.
  double dt = 1e-8;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double output_stride = 1e-5;
  std::size_t max_steps = 200'000'000;
  InitialProjection initial = InitialProjection::interpolation;
  /// Undershoot allowed below zero before a positivity violation is declared.
  double positivity_tol = 1e-10;
  /// Upper concentration bound M1; <= 0 selects 2 max(max u0, b_high / H).
  double concentration_bound = 0.0;
  ViolationPolicy on_violation = ViolationPolicy::abort;
  /// Fraction of the RK4 real-axis stability interval used by the step cap.
  double stability_safety = 0.9;

  void validate() const;
  nlohmann::json to_json() const;
};

struct SolverState {
  double tau = 0.0;
  std::vector<double> alpha;
  double h = 0.0;
  double hprime = 0.0;  ///< interface velocity at this state
};

struct Event {
  enum class Kind { breakthrough, invariant_violation, completion };
  Kind kind = Kind::completion;
  double tau = 0.0;
  std::string message;
};

std::string to_string(Event::Kind k);

struct Trajectory {
  std::shared_ptr<const Mesh> mesh;
  double output_stride = 0.0;
  std::vector<double> times;
  std::vector<SolverState> states;
  std::vector<std::vector<double>> rhs_snapshots;  ///< alpha' at each sample
  std::vector<Event> events;
  std::size_t steps = 0;
  std::size_t rejected_steps = 0;
  std::size_t rhs_evaluations = 0;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  const SolverState& back() const { return states.back(); }
  bool reached_breakthrough() const;
};

/// Coupled right-hand side of M alpha' = F(alpha, h, tau), h' = G2(alpha, h).
class SemiDiscreteSystem {
 public:
  SemiDiscreteSystem(const FemOperators& ops, const DimensionlessParams& params)
      : ops_(ops), params_(params) {}

  /// Writes alpha' into alpha_dot and returns h'.
  double derivative(double tau, std::span<const double> alpha, double h,
                    std::span<double> alpha_dot) const;

  /// Step size keeping explicit RK4 inside its stability interval at this state.
  double stable_step(const SolverState& s, double safety) const;

  const FemOperators& ops() const { return ops_; }
  const DimensionlessParams& params() const { return params_; }

 private:
  const FemOperators& ops_;
  const DimensionlessParams& params_;
};

/// Initial coefficients from u0 (nodal interpolation or L^2 projection).
std::vector<double> initial_coefficients(const FemOperators& ops, const InitialCondition& u0,
                                         InitialProjection mode);

/// One classical RK4 step of the monolithic (alpha, h) system.
SolverState step(const SolverState& state, double dt, const FemOperators& ops,
                 const DimensionlessParams& params);

/// Integrates from tau = 0 to params.T (or the first terminal event).
Trajectory solve(const DimensionlessParams& params, std::shared_ptr<const Mesh> mesh,
                 const InitialCondition& u0, const IntegratorConfig& cfg);
Trajectory solve(const DimensionlessParams& params, const FemOperators& ops,
                 const InitialCondition& u0, const IntegratorConfig& cfg);

struct EnergyDiagnostic {
  double max_l2_sq = 0.0;      ///< max_tau alpha^T M alpha
  double int_h1_semi_sq = 0.0; ///< int alpha^T A alpha dtau (trapezoid)
  double total() const { return max_l2_sq + int_h1_semi_sq; }
};

EnergyDiagnostic energy_diagnostic(const Trajectory& traj, const FemOperators& ops);

}  // namespace mbfem
