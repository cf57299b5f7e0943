#pragma once

#include <Eigen/Dense>
#include <memory>

namespace pairrank::cheb {

// Grid of first-kind Chebyshev nodes mapped to [0,1], with the matching
// interpolatory quadrature rule and dense value<->coefficient transforms.
//
// node[k] = 1/2 - (1/2) cos((k + 1/2) pi / L), ascending in k.
// Expansions are in T_a(2x - 1); an L-point grid determines coefficients
// 0..L-1 exactly, and the quadrature rule integrates polynomials of degree
// < L exactly on [0,1].
class ChebGrid {
 public:
  explicit ChebGrid(int order);

  int order() const { return order_; }
  const Eigen::VectorXd& nodes() const { return nodes_; }
  const Eigen::VectorXd& quad_weights() const { return quad_weights_; }

  // weights for the first moment: sum_k moment_weights[k] * v[k]
  // equals the exact integral of x * interp(v) over [0,1]
  const Eigen::VectorXd& moment_weights() const { return moment_weights_; }

  // vals = coeffs_to_vals * coeffs ; coeffs = vals_to_coeffs * vals
  const Eigen::MatrixXd& coeffs_to_vals() const { return c2v_; }
  const Eigen::MatrixXd& vals_to_coeffs() const { return v2c_; }

  double integrate(const Eigen::VectorXd& node_values) const {
    return quad_weights_.dot(node_values);
  }
  // tensor-product rule over [0,1]^2; rows index x, columns index y
  double integrate2d(const Eigen::MatrixXd& node_values) const {
    return quad_weights_.dot(node_values * quad_weights_);
  }

 private:
  int order_;
  Eigen::VectorXd nodes_;
  Eigen::VectorXd quad_weights_;
  Eigen::VectorXd moment_weights_;
  Eigen::MatrixXd c2v_;  // c2v_(k, a) = T_a(2 node[k] - 1)
  Eigen::MatrixXd v2c_;
};

using GridPtr = std::shared_ptr<const ChebGrid>;

GridPtr make_grid(int order);

// Scalar function on [0,1] as coefficients of T_a(2x-1).
struct ChebFun1D {
  Eigen::VectorXd coeffs;

  // Clenshaw evaluation; x is clamped to [0,1].
  double eval(double x) const;
};

// Function on [0,1]^2 as coefficients c(a,b) of T_a(2x-1) T_b(2y-1).
struct ChebFun2D {
  Eigen::MatrixXd coeffs;

  double eval(double x, double y) const;
};

ChebFun1D vals_to_fun(const Eigen::VectorXd& node_values, const ChebGrid& grid);
Eigen::VectorXd fun_to_vals(const ChebFun1D& f, const ChebGrid& grid);

ChebFun2D vals_to_fun2d(const Eigen::MatrixXd& node_values, const ChebGrid& grid);
Eigen::MatrixXd fun_to_vals2d(const ChebFun2D& f, const ChebGrid& grid);

}  // namespace pairrank::cheb
