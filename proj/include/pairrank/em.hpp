#pragma once

#include <memory>
#include <vector>

#include "pairrank/bp.hpp"
#include "pairrank/mstep_cheb.hpp"
#include "pairrank/mstep_nn.hpp"
#include "pairrank/posterior.hpp"

namespace pairrank {

enum class Backend { chebyshev, neural };

struct EMOptions {
  Backend backend = Backend::chebyshev;
  int grid_order = 32;
  double baseline_slope = 5.0;  // slope of the logistic initial guess
  double kernel_tol = 1e-3;     // max-abs node change of b between iterations
  int max_iters = 50;
  bool warm_start_bp = true;
  BPOptions bp;
  ChebMStepOptions cheb;
  NNTrainOptions nn;
  uint64_t seed = 0;
};

struct EMState {
  int iterations = 0;
  bool converged = false;
  double kernel_delta = 0.0;
  // per-iteration variational lower bound on the penalized log evidence
  // (data term + Bethe entropy of the beliefs + kernel prior), normalized
  // per observed match
  std::vector<double> bound_trace;
  std::vector<int> bp_sweeps;
};

struct FitResult {
  Kernel kernel;
  Posterior posterior;
  EMState state;
};

// E-step sufficient statistic: match-count-weighted sum of pairwise joint
// marginals at node pairs. Its integral equals the total match count.
QGrid accumulate_q(const WinMatrix& w, const MessageSet& msgs, const Kernel& kernel);

// Alternate belief propagation and kernel refits until the kernel stops
// moving. With no matches the initial guess is returned untouched and the
// posterior is the prior.
FitResult em_fit(std::shared_ptr<const WinMatrix> w, const EMOptions& opts);

}  // namespace pairrank
