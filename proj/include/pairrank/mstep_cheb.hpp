#pragma once

#include <Eigen/Dense>

#include "pairrank/cheb.hpp"
#include "pairrank/kernel.hpp"

namespace pairrank {

struct QGrid {
  Eigen::MatrixXd values;     // accumulated joint mass at node pairs
  double total_weight = 0.0;  // sum of all match counts
};

// Unconstrained parameters of the monotone antisymmetric log-odds surface.
// Only the strict upper triangle of g is used. Node values are
//   f(x_k, x_m) = S(m,k)^(1/p) - S(k,m)^(1/p),
//   S(a,b) = sum_{a<=i<j<=b} |g_ij|^p  (empty when a >= b),
// which makes f antisymmetric, zero on the diagonal, non-decreasing in the
// first argument and non-increasing in the second.
struct MonotoneParams {
  Eigen::MatrixXd g;
  int p = 8;
};

struct ChebMStepOptions {
  int p = 8;                         // p-norm order (even)
  double penalty_scale = 1.0 / 64.0; // weight of the smoothness penalty
  double grad_tol = 0.0;             // 0 -> 1e-9 * max(1, total weight)
  int max_iters = 100;               // polish iterations after the root solve
  bool trace = false;                // print per-iteration objective values
};

struct ChebFitInfo {
  int iterations = 0;
  double objective = 0.0;
  double grad_norm = 0.0;
  double regularizer = 0.0;  // penalty term at the optimum
};

// Penalized maximum-likelihood refit of the kernel on a fixed grid:
// maximize  iint Q(u,v) log sigma(f(u,v)) du dv  -  scale * sum ((a^2+b^2) c_ab)^2
// over the monotone parameterization, by damped Newton with line search.
class ChebMStep {
 public:
  struct PairView;  // internal pair-space scratch

  ChebMStep(cheb::GridPtr grid, ChebMStepOptions opts);

  int order() const { return grid_->order(); }
  const ChebMStepOptions& options() const { return opts_; }

  // node values of f for given parameters (exactly antisymmetric)
  Eigen::MatrixXd monotone_values(const MonotoneParams& params) const;

  // smoothness penalty of arbitrary node values (via their coefficients)
  double penalty(const Eigen::MatrixXd& f_vals) const;

  double objective(const QGrid& q, const MonotoneParams& params) const;
  // dJ/dg on the strict upper triangle (zero elsewhere)
  Eigen::MatrixXd gradient(const QGrid& q, const MonotoneParams& params) const;
  // full Hessian over the vectorized strict upper triangle (pair order)
  Eigen::MatrixXd hessian(const QGrid& q, const MonotoneParams& params) const;

  // parameters approximately reproducing an existing kernel's log-odds
  MonotoneParams warm_start(const Kernel& current) const;

  // params is updated in place (suitable for warm starts across calls)
  Kernel fit(const QGrid& q, MonotoneParams& params, ChebFitInfo* info = nullptr) const;

 private:
  void derivatives(const QGrid& q, const MonotoneParams& params, const PairView& pv,
                   Eigen::VectorXd* grad, Eigen::MatrixXd* hess) const;
  Eigen::VectorXd solve_pair_roots(const QGrid& q, Eigen::VectorXd r) const;

  cheb::GridPtr grid_;
  ChebMStepOptions opts_;
  Eigen::MatrixXd quad2_;         // outer product of quadrature weights
  Eigen::MatrixXd penalty_hess_;  // penalty Hessian over pair space (constant)
  Eigen::VectorXi pair_row_, pair_col_;  // pair t -> (m, k), m < k
  Eigen::MatrixXi pair_index_;           // (m, k) -> t

  int num_pairs() const { return int(pair_row_.size()); }
};

}  // namespace pairrank
