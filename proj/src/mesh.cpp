#include "mbfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mbfem/error.hpp"
#include "mbfem/quadrature.hpp"

namespace mbfem {

Mesh::Mesh(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 3) throw ConfigError("mesh needs at least 3 nodes");
  if (nodes_.front() != 0.0 || nodes_.back() != 1.0)
    throw ConfigError("mesh endpoints must be exactly 0 and 1");
  sizes_.resize(nodes_.size() - 1);
  for (std::size_t e = 0; e < sizes_.size(); ++e) {
    if (!std::isfinite(nodes_[e + 1]) || !(nodes_[e + 1] > nodes_[e]))
      throw ConfigError("mesh nodes must be strictly increasing (violated at index " +
                        std::to_string(e + 1) + ")");
    sizes_[e] = nodes_[e + 1] - nodes_[e];
  }
  k_max_ = *std::max_element(sizes_.begin(), sizes_.end());
  k_min_ = *std::min_element(sizes_.begin(), sizes_.end());
}

Mesh Mesh::uniform(std::size_t n_nodes) {
  if (n_nodes < 3) throw ConfigError("uniform mesh needs N >= 3");
  std::vector<double> y(n_nodes);
  const double last = static_cast<double>(n_nodes - 1);
  for (std::size_t i = 0; i < n_nodes; ++i) y[i] = static_cast<double>(i) / last;
  y.back() = 1.0;
  return Mesh(std::move(y));
}

Mesh Mesh::from_nodes(std::vector<double> nodes) { return Mesh(std::move(nodes)); }

Mesh Mesh::graded(std::size_t n_nodes, double ratio) {
  if (n_nodes < 3) throw ConfigError("graded mesh needs N >= 3");
  if (!(ratio > 0.0) || !std::isfinite(ratio)) throw ConfigError("grading ratio must be positive");
  const std::size_t n_el = n_nodes - 1;
  std::vector<double> sizes(n_el);
  double total = 0.0;
  for (std::size_t e = 0; e < n_el; ++e) {
    sizes[e] = std::pow(ratio, static_cast<double>(e));
    total += sizes[e];
  }
  std::vector<double> y(n_nodes, 0.0);
  double acc = 0.0;
  for (std::size_t e = 0; e + 1 < n_el; ++e) {
    acc += sizes[e];
    y[e + 1] = acc / total;
  }
  y.back() = 1.0;
  return Mesh(std::move(y));
}

std::size_t Mesh::locate(double y) const {
  if (y >= 1.0) return element_count() - 1;
  if (y <= 0.0) return 0;
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), y);
  return std::min(static_cast<std::size_t>(it - nodes_.begin()) - 1, element_count() - 1);
}

double hat(const Mesh& mesh, std::size_t i, double y) {
  const auto n = mesh.size();
  if (i > 0 && y >= mesh.node(i - 1) && y <= mesh.node(i))
    return (y - mesh.node(i - 1)) / mesh.element_size(i - 1);
  if (i + 1 < n && y >= mesh.node(i) && y <= mesh.node(i + 1))
    return (mesh.node(i + 1) - y) / mesh.element_size(i);
  return 0.0;
}

double hat_derivative(const Mesh& mesh, std::size_t i, double y) {
  // One-sided at nodes: the element returned by locate() decides.
  const std::size_t e = mesh.locate(y);
  if (e + 1 == i) return 1.0 / mesh.element_size(e);
  if (e == i) return -1.0 / mesh.element_size(e);
  return 0.0;
}

NodalFunction::NodalFunction(std::shared_ptr<const Mesh> mesh, std::vector<double> values)
    : mesh_(std::move(mesh)), values_(std::move(values)) {
  if (!mesh_) throw ConfigError("NodalFunction: null mesh");
  if (values_.size() != mesh_->size())
    throw ConfigError("NodalFunction: value count " + std::to_string(values_.size()) +
                      " does not match node count " + std::to_string(mesh_->size()));
}

double eval_piecewise_linear(const Mesh& mesh, std::span<const double> values, double y) {
  const std::size_t e = mesh.locate(y);
  const double w = (y - mesh.node(e)) / mesh.element_size(e);
  if (w <= 0.0) return values[e];
  if (w >= 1.0) return values[e + 1];
  return (1.0 - w) * values[e] + w * values[e + 1];
}

double NodalFunction::eval(double y) const {
  if (!(y >= 0.0 && y <= 1.0))
    throw ConfigError("NodalFunction::eval: y = " + std::to_string(y) + " outside [0, 1]");
  return eval_piecewise_linear(*mesh_, values_, y);
}

double NodalFunction::slope(std::size_t e) const {
  return (values_[e + 1] - values_[e]) / mesh_->element_size(e);
}

NodalFunction interpolate(const std::function<double(double)>& f,
                          std::shared_ptr<const Mesh> mesh) {
  std::vector<double> v(mesh->size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = f(mesh->node(i));
    if (!std::isfinite(v[i]))
      throw ConfigError("interpolate: non-finite value at node " + std::to_string(i));
  }
  return NodalFunction(std::move(mesh), std::move(v));
}

InterpolationErrors interpolation_errors(const std::function<double(double)>& f,
                                         const std::function<double(double)>& df,
                                         const NodalFunction& interpolant) {
  const Mesh& mesh = interpolant.mesh();
  const auto v = interpolant.values();
  double l2 = 0.0;
  double h1 = 0.0;
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const double a = mesh.node(e);
    const double b = mesh.node(e + 1);
    const double s = interpolant.slope(e);
    l2 += integrate(
        [&](double y) {
          const double w = (y - a) / (b - a);
          const double d = f(y) - ((1.0 - w) * v[e] + w * v[e + 1]);
          return d * d;
        },
        a, b);
    h1 += integrate(
        [&](double y) {
          const double d = df(y) - s;
          return d * d;
        },
        a, b);
  }
  return {std::sqrt(l2), std::sqrt(h1)};
}

}  // namespace mbfem
