#pragma once

#include <Eigen/Dense>
#include <functional>

#include "pairrank/cheb.hpp"

namespace pairrank {

// Outcome kernel b(x,y): probability that skill x beats skill y.
// Stored as node values on an L x L Chebyshev grid together with the
// Chebyshev expansion of the log-odds f = logit(b), which is antisymmetric
// (f(x,y) = -f(y,x)) so that b(x,y) + b(y,x) = 1.
//
// Probabilities are kept inside (eps, 1-eps) so that w * log b stays finite
// for arbitrarily sharp kernels.
class Kernel {
 public:
  static constexpr double kProbFloor = 1e-9;

  // f_node_values holds the log-odds at node pairs (row = x index, column =
  // y index); it is antisymmetrized in value space before use.
  Kernel(cheb::GridPtr grid, const Eigen::MatrixXd& f_node_values);

  // Bradley-Terry baseline b(x,y) = 1 / (1 + exp(slope * (y - x))).
  static Kernel logistic(cheb::GridPtr grid, double slope);

  // Sample an arbitrary win-probability function at the grid nodes.
  static Kernel from_win_probability(cheb::GridPtr grid,
                                     const std::function<double(double, double)>& b);

  const cheb::ChebGrid& grid() const { return *grid_; }
  const cheb::GridPtr& grid_ptr() const { return grid_; }

  // b at node pairs, row = x index, column = y index
  const Eigen::MatrixXd& node_values() const { return b_; }
  const Eigen::MatrixXd& log_node_values() const { return log_b_; }
  const Eigen::MatrixXd& f_node_values() const { return f_; }
  const cheb::ChebFun2D& log_odds() const { return f_fun_; }

  // sigma(f(x,y)) via the Chebyshev expansion, clamped to (eps, 1-eps)
  double eval(double x, double y) const;

 private:
  cheb::GridPtr grid_;
  Eigen::MatrixXd f_;      // antisymmetric log-odds at nodes
  Eigen::MatrixXd b_;      // sigma(f), clamped
  Eigen::MatrixXd log_b_;
  cheb::ChebFun2D f_fun_;
};

double clamp_probability(double p);

}  // namespace pairrank
