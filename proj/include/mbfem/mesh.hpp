#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace mbfem {

/// Strictly increasing nodes 0 = y_0 < ... < y_{N-1} = 1 on the reference interval.
class Mesh {
 public:
  static Mesh uniform(std::size_t n_nodes);
  static Mesh from_nodes(std::vector<double> nodes);
  /// Geometric grading: consecutive element sizes grow by `ratio`
  /// (ratio < 1 refines toward y = 1).
  static Mesh graded(std::size_t n_nodes, double ratio);

  std::size_t size() const { return nodes_.size(); }
  std::size_t element_count() const { return nodes_.size() - 1; }
  std::span<const double> nodes() const { return nodes_; }
  double node(std::size_t i) const { return nodes_[i]; }
  /// k_i = y_{i+1} - y_i.
  double element_size(std::size_t e) const { return sizes_[e]; }
  std::span<const double> element_sizes() const { return sizes_; }
  double k_max() const { return k_max_; }
  double k_min() const { return k_min_; }

  /// Element containing y; nodes belong to the element on their right except y = 1.
  std::size_t locate(double y) const;

 private:
  explicit Mesh(std::vector<double> nodes);
  std::vector<double> nodes_;
  std::vector<double> sizes_;
  double k_max_ = 0.0;
  double k_min_ = 0.0;
};

/// Piecewise-linear hat basis of V_k.
double hat(const Mesh& mesh, std::size_t i, double y);
double hat_derivative(const Mesh& mesh, std::size_t i, double y);

/// u_k(y) = sum_i values[i] * phi_i(y).
class NodalFunction {
 public:
  NodalFunction(std::shared_ptr<const Mesh> mesh, std::vector<double> values);

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  std::span<const double> values() const { return values_; }

  /// Throws for y outside [0, 1].
  double eval(double y) const;
  /// Constant slope on element e.
  double slope(std::size_t e) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  std::vector<double> values_;
};

/// Piecewise-linear evaluation of nodal values on a mesh (no range check beyond clamping).
double eval_piecewise_linear(const Mesh& mesh, std::span<const double> values, double y);

/// Lagrange interpolant I_k f.
NodalFunction interpolate(const std::function<double(double)>& f,
                          std::shared_ptr<const Mesh> mesh);

struct InterpolationErrors {
  double l2 = 0.0;        ///< ||f - I_k f||
  double h1_semi = 0.0;   ///< ||(f - I_k f)'||
};

/// Errors of the interpolant with 5-point Gauss quadrature per element.
InterpolationErrors interpolation_errors(const std::function<double(double)>& f,
                                         const std::function<double(double)>& df,
                                         const NodalFunction& interpolant);

}  // namespace mbfem
