#include "mbfem/physical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mbfem/error.hpp"

namespace mbfem {

PhysicalTrajectory back_transform(const Trajectory& traj, const PhysicalParams& p,
                                  std::size_t grid) {
  PhysicalTrajectory out;
  if (traj.empty()) return out;
  const Mesh& mesh = *traj.mesh;
  if (grid == 0) {
    double smax = 0.0;
    for (const auto& st : traj.states) smax = std::max(smax, st.h);
    for (double y : mesh.nodes()) out.x.push_back(to_physical_coordinate(y, smax * p.L));
  } else {
    if (grid < 2) throw ConfigError("back_transform: grid needs at least 2 points");
    for (std::size_t i = 0; i < grid; ++i)
      out.x.push_back(p.L * static_cast<double>(i) / static_cast<double>(grid - 1));
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double vel_scale = p.D / p.L;  // dh/dtau -> ds/dt
  for (std::size_t j = 0; j < traj.size(); ++j) {
    const auto& st = traj.states[j];
    const double s = p.L * st.h;
    out.t.push_back(to_physical_time(p, traj.times[j]));
    out.s.push_back(s);
    out.ds.push_back(vel_scale * st.hprime);
    std::vector<double> row(out.x.size(), nan);
    std::vector<bool> in(out.x.size(), false);
    for (std::size_t i = 0; i < out.x.size(); ++i) {
      if (out.x[i] > s * (1.0 + 1e-14)) continue;
      const double y = std::min(1.0, to_reference_coordinate(out.x[i], s));
      row[i] = p.m0 * eval_piecewise_linear(mesh, st.alpha, y);
      in[i] = true;
    }
    out.m.push_back(std::move(row));
    out.inside.push_back(std::move(in));
  }
  return out;
}

Profile physical_profile(const Trajectory& traj, std::size_t sample, const PhysicalParams& p) {
  if (sample >= traj.size()) throw ConfigError("physical_profile: sample out of range");
  const auto& st = traj.states[sample];
  Profile pr;
  pr.t = to_physical_time(p, traj.times[sample]);
  const double s = p.L * st.h;
  for (std::size_t i = 0; i < traj.mesh->size(); ++i) {
    pr.x.push_back(to_physical_coordinate(traj.mesh->node(i), s));
    pr.m.push_back(p.m0 * st.alpha[i]);
  }
  return pr;
}

}  // namespace mbfem
