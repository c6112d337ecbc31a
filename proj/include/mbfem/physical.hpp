#pragma once

#include <cstddef>
#include <vector>

#include <json.hpp>

#include "mbfem/integrator.hpp"
#include "mbfem/model.hpp"

namespace mbfem {

/// Trajectory mapped back to minutes, mm and gram/mm^3.
struct PhysicalTrajectory {
  std::vector<double> t;   ///< [min]
  std::vector<double> s;   ///< interface position [mm]
  std::vector<double> ds;  ///< interface velocity [mm/min]
  std::vector<double> x;   ///< physical grid [mm] shared by all samples
  /// m[j][i] = concentration at (t[j], x[i]); NaN where x[i] > s[j].
  std::vector<std::vector<double>> m;
  std::vector<std::vector<bool>> inside;

  std::size_t size() const { return t.size(); }
};

/// `grid` = number of equispaced x samples on [0, L]; 0 uses the reference
/// nodes scaled by the largest s, so every node of the final state is hit.
PhysicalTrajectory back_transform(const Trajectory& traj, const PhysicalParams& p,
                                  std::size_t grid = 201);

/// Concentration profile at one sample on its own wet region: x_i = s y_i.
struct Profile {
  double t = 0.0;
  std::vector<double> x;
  std::vector<double> m;
};
Profile physical_profile(const Trajectory& traj, std::size_t sample, const PhysicalParams& p);

}  // namespace mbfem
