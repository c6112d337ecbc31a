#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "mbfem/assembly.hpp"
#include "mbfem/integrator.hpp"
#include "mbfem/model.hpp"

namespace mbfem {

/// Space-time norms of u - u_k and h - h_k. Time integrals use the trapezoid
/// rule over the recorded samples.
enum class NormKind {
  l2_l2,              ///< L2(S, L2)
  l2_h1,              ///< L2(S, H1): L2 part plus the derivative part
  linf_l2,            ///< Linf(S, L2)
  boundary_l2,        ///< L2(S) of h - h_k
  boundary_deriv_l2,  ///< L2(S) of h' - h_k'
};

std::string to_string(NormKind k);
/// Accepts "L2L2", "L2H1", "LinfL2", "boundary_L2", "boundary_deriv_L2" (case-insensitive).
NormKind norm_from_string(const std::string& s);
const std::vector<NormKind>& all_norms();

/// How L2 is evaluated in space.
///  nodal: trapezoid weights on the coarse nodes, with the reference evaluated there.
///  exact: exact integral of the difference of the two piecewise-linear functions.
enum class SpatialQuadrature { nodal, exact };

/// How the H1 part compares derivatives.
///  exact: elementwise on the union of both node sets (the true H1 distance).
///  restricted: on the coarse elements, against the reference interpolated at the coarse nodes.
enum class GradientComparison { exact, restricted };

struct NormOptions {
  SpatialQuadrature l2 = SpatialQuadrature::nodal;
  GradientComparison gradient = GradientComparison::exact;
};

/// Sample times must coincide; the reference mesh must be at least as fine.
double discrete_error(const Trajectory& coarse, const Trajectory& reference, NormKind kind,
                      const NormOptions& opts = {});

/// sup ||e||^2 + int ||e_y||^2 dtau + sup |h - h_k|^2, the quantity bounded by the estimator.
double true_squared_error(const Trajectory& coarse, const Trajectory& reference);

struct Estimate {
  double eta_total = 0.0;
  std::vector<double> per_element;  ///< k_i^2 (int ||R||^2_{I_i} + k_i^2 |u0|^2_{H2(I_i)})
  double initial_interface = 0.0;   ///< |h(0) - h_k(0)|^2
  double residual_part = 0.0;       ///< sum k_i^2 int ||R||^2
  double initial_data_part = 0.0;   ///< sum k_i^4 |u0|^2_{H2}
};

Estimate aposteriori_estimate(const Trajectory& traj, const FemOperators& ops,
                              const DimensionlessParams& params, const InitialCondition& u0);

/// log2(e_coarse / e_fine).
double convergence_order(double e_coarse, double e_fine);

struct StudyConfig {
  std::vector<std::size_t> meshes{20, 40, 80, 160, 320};
  std::size_t reference_n = 640;
  IntegratorConfig integrator;
  std::vector<NormKind> norms = all_norms();
  NormOptions norm_options;
  bool estimator = true;
  bool parallel = true;

  /// Node counts double from one level to the next and the reference is the
  /// coarsest count times a power of two, above the finest level.
  void validate() const;
};

struct StudyRow {
  std::size_t n = 0;
  double k = 0.0;
  std::map<NormKind, double> error;
  std::map<NormKind, double> order;  ///< against the previous row; empty on the first
  double eta = 0.0;
  double true_error_sq = 0.0;
  double effectivity = 0.0;  ///< eta / true_error_sq
  EnergyDiagnostic energy;
  std::size_t steps = 0;
};

/// Acceptance band on the empirical orders of one norm.
struct OrderBand {
  NormKind norm;
  double lo;
  double hi;  ///< +inf for a lower bound only
};

struct BandResult {
  OrderBand band;
  std::size_t pair_index;  ///< rows pair_index-1 and pair_index
  double order;
  bool passed;
};

struct ErrorReport {
  std::vector<NormKind> norms;
  std::size_t reference_n = 0;
  std::vector<StudyRow> rows;
  EnergyDiagnostic reference_energy;
  std::vector<Event> reference_events;

  static std::vector<OrderBand> default_bands();
  std::vector<BandResult> check(const std::vector<OrderBand>& bands) const;

  /// Columns: N, k, then error and order per norm, eta, true_error_sq, effectivity.
  std::string to_csv() const;
  nlohmann::json to_json() const;
};

/// Solves every level and the reference (concurrently when cfg.parallel) and
/// compares each level against the reference.
ErrorReport convergence_study(const DimensionlessParams& params, const InitialCondition& u0,
                              const StudyConfig& cfg);

/// The same comparison on trajectories already computed; `levels` and `level_ops`
/// are ordered coarse to fine.
ErrorReport build_report(const DimensionlessParams& params, const InitialCondition& u0,
                         const std::vector<const Trajectory*>& levels,
                         const std::vector<const FemOperators*>& level_ops,
                         const Trajectory& reference, const FemOperators& reference_ops,
                         const std::vector<NormKind>& norms, const NormOptions& opts,
                         bool estimator);

}  // namespace mbfem
