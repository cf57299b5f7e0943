#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

#include "pairrank/kernel.hpp"
#include "pairrank/win_matrix.hpp"

namespace pairrank {

struct BPOptions {
  double tol = 1e-8;      // residual threshold on node-value changes
  int max_sweeps = 1000;
  double damping = 0.2;   // in [0,1); new = (1-d)*update + d*old
};

// One density per directed observed pair. For edge (a,b) with a < b,
// to_a holds mu_{a<-b} (what b's record says about b's own skill, with the
// evidence from a removed) and to_b holds mu_{b<-a}. Densities are node
// values on the kernel's grid, non-negative and unit mass.
struct MessageSet {
  std::vector<Eigen::VectorXd> to_a;
  std::vector<Eigen::VectorXd> to_b;
  int sweeps = 0;
  bool converged = false;
  double residual = std::numeric_limits<double>::infinity();
};

// Synchronous damped sweeps until the residual drops below tol or
// max_sweeps is reached. `warm` (when shape-compatible) seeds the iteration;
// otherwise all messages start uniform.
MessageSet run_bp(const WinMatrix& w, const Kernel& kernel, const BPOptions& opts,
                  const MessageSet* warm = nullptr);

// Posterior marginal density for one player (uniform when matchless).
Eigen::VectorXd bp_marginal(const MessageSet& msgs, const WinMatrix& w,
                            const Kernel& kernel, int player);

// Joint posterior density over (x_i, x_j) at node pairs, unit mass.
// Only defined for pairs that played; throws not_found otherwise.
Eigen::MatrixXd bp_joint_marginal(const MessageSet& msgs, const WinMatrix& w,
                                  const Kernel& kernel, int i, int j);

}  // namespace pairrank
