#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pairrank/cheb.hpp"
#include "pairrank/kernel.hpp"
#include "pairrank/mlp.hpp"
#include "pairrank/mstep_cheb.hpp"  // QGrid

namespace pairrank {

struct NNTrainOptions {
  std::vector<int> hidden = {64, 64};
  int64_t sample_factor = 50;       // samples = factor * total matches
  int64_t sample_cap = 1000000;
  int epochs = 20;
  int batch = 256;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  uint64_t seed = 0;
};

struct NNFitInfo {
  int64_t samples = 0;
  double initial_loss = 0.0;  // first-epoch mean total loss
  double final_loss = 0.0;    // last-epoch mean total loss
  double regularizer = 0.0;   // |theta|^2 / total matches at the end
};

// i.i.d. draws with density proportional to the accumulated Q grid:
// categorical over grid cells (node-centered, cell mass = value * area)
// followed by a uniform jitter inside the chosen cell.
std::vector<std::pair<double, double>> sample_pairs(const QGrid& q,
                                                    const cheb::ChebGrid& grid,
                                                    int64_t count, uint64_t seed);

// Loss over an explicit sample set:
//   sum_s -log sigma(g(x_s,y_s) - g(y_s,x_s)) + |theta|^2 / total_weight.
// When grads is non-null it receives d(loss)/d(theta). Exposed for tests.
double nn_loss(const MLP& net, const std::vector<std::pair<double, double>>& samples,
               double total_weight, MLP::Grads* grads = nullptr);

// Minimize the sampled loss with Adam and resample the trained antisymmetric
// log-odds onto the grid. The network is updated in place (warm starts).
Kernel fit_kernel_nn(const QGrid& q, const cheb::GridPtr& grid, MLP& net,
                     const NNTrainOptions& opts, NNFitInfo* info = nullptr);

}  // namespace pairrank
