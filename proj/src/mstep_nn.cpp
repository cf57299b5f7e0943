#include "pairrank/mstep_nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pairrank/error.hpp"
#include "pairrank/rng.hpp"

namespace pairrank {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

double log_sigmoid(double z) {
  if (z >= 0.0) return -std::log1p(std::exp(-z));
  return z - std::log1p(std::exp(z));
}

// node-centered cell boundaries on [0,1]
Eigen::VectorXd cell_bounds(const cheb::ChebGrid& grid) {
  const int L = grid.order();
  Eigen::VectorXd b(L + 1);
  b[0] = 0.0;
  for (int k = 1; k < L; ++k) b[k] = 0.5 * (grid.nodes()[k - 1] + grid.nodes()[k]);
  b[L] = 1.0;
  return b;
}

}  // namespace

std::vector<std::pair<double, double>> sample_pairs(const QGrid& q,
                                                    const cheb::ChebGrid& grid,
                                                    int64_t count, uint64_t seed) {
  const int L = grid.order();
  if (q.values.rows() != L || q.values.cols() != L)
    fail(ErrorCode::invalid_argument, "Q grid shape does not match grid order");
  if (count < 1) fail(ErrorCode::invalid_argument, "sample count must be >= 1");

  Eigen::VectorXd bounds = cell_bounds(grid);
  std::vector<double> cum(size_t(L) * size_t(L));
  double total = 0.0;
  for (int k = 0; k < L; ++k) {
    const double wk = bounds[k + 1] - bounds[k];
    for (int m = 0; m < L; ++m) {
      double mass = q.values(k, m) * wk * (bounds[m + 1] - bounds[m]);
      total += std::max(mass, 0.0);
      cum[size_t(k) * size_t(L) + size_t(m)] = total;
    }
  }
  if (!(total > 0.0)) fail(ErrorCode::invalid_argument, "cannot sample from a zero-mass Q grid");

  Rng rng(seed);
  std::vector<std::pair<double, double>> out;
  out.reserve(size_t(count));
  for (int64_t s = 0; s < count; ++s) {
    double u = rng.next_double() * total;
    size_t cell = size_t(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
    if (cell >= cum.size()) cell = cum.size() - 1;
    const int k = int(cell / size_t(L));
    const int m = int(cell % size_t(L));
    double x = bounds[k] + rng.next_double() * (bounds[k + 1] - bounds[k]);
    double y = bounds[m] + rng.next_double() * (bounds[m + 1] - bounds[m]);
    out.emplace_back(x, y);
  }
  return out;
}

double nn_loss(const MLP& net, const std::vector<std::pair<double, double>>& samples,
               double total_weight, MLP::Grads* grads) {
  const int64_t S = int64_t(samples.size());
  const double W = std::max(total_weight, 1.0);
  double data = 0.0;
  if (grads) grads->set_zero();
  if (S > 0) {
    Eigen::MatrixXd in1(2, S), in2(2, S);
    for (int64_t s = 0; s < S; ++s) {
      in1(0, s) = samples[size_t(s)].first;
      in1(1, s) = samples[size_t(s)].second;
      in2(0, s) = samples[size_t(s)].second;
      in2(1, s) = samples[size_t(s)].first;
    }
    MLP::Tape t1, t2;
    Eigen::MatrixXd o1 = net.forward_batch(in1, grads ? &t1 : nullptr);
    Eigen::MatrixXd o2 = net.forward_batch(in2, grads ? &t2 : nullptr);
    Eigen::MatrixXd dldf(1, S);
    for (int64_t s = 0; s < S; ++s) {
      double f = o1(0, s) - o2(0, s);
      data += -log_sigmoid(f);
      dldf(0, s) = sigmoid(f) - 1.0;
    }
    if (grads) {
      net.backward_batch(t1, dldf, *grads);
      net.backward_batch(t2, -dldf, *grads);
    }
  }
  if (grads) {
    for (size_t l = 0; l < grads->w.size(); ++l) {
      grads->w[l] += (2.0 / W) * net.weights()[l];
      grads->b[l] += (2.0 / W) * net.biases()[l];
    }
  }
  return data + net.squared_norm() / W;
}

Kernel fit_kernel_nn(const QGrid& q, const cheb::GridPtr& grid, MLP& net,
                     const NNTrainOptions& opts, NNFitInfo* info) {
  if (opts.epochs < 1 || opts.batch < 1 || !(opts.learning_rate > 0.0))
    fail(ErrorCode::invalid_argument, "bad neural training options");
  const double W = std::max(q.total_weight, 1.0);
  int64_t count = std::min<int64_t>(opts.sample_factor * int64_t(std::llround(q.total_weight)),
                                    opts.sample_cap);
  count = std::max<int64_t>(count, 1);
  auto samples = sample_pairs(q, *grid, count, derive_seed(opts.seed, 1));

  Adam adam(net, opts.learning_rate, opts.beta1, opts.beta2, opts.adam_eps);
  MLP::Grads grads = net.zero_grads();
  Rng shuffle_rng(derive_seed(opts.seed, 2));
  std::vector<int64_t> order(static_cast<size_t>(count), 0);
  std::iota(order.begin(), order.end(), int64_t(0));

  double first_epoch_loss = 0.0, last_epoch_loss = 0.0;
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    for (size_t i = size_t(count); i > 1; --i)
      std::swap(order[i - 1], order[size_t(shuffle_rng.next_below(uint64_t(i)))]);

    double epoch_data = 0.0;
    for (int64_t start = 0; start < count; start += opts.batch) {
      const int64_t B = std::min<int64_t>(opts.batch, count - start);
      Eigen::MatrixXd in1(2, B), in2(2, B);
      for (int64_t s = 0; s < B; ++s) {
        const auto& pt = samples[size_t(order[size_t(start + s)])];
        in1(0, s) = pt.first;
        in1(1, s) = pt.second;
        in2(0, s) = pt.second;
        in2(1, s) = pt.first;
      }
      MLP::Tape t1, t2;
      Eigen::MatrixXd o1 = net.forward_batch(in1, &t1);
      Eigen::MatrixXd o2 = net.forward_batch(in2, &t2);
      Eigen::MatrixXd dldf(1, B);
      for (int64_t s = 0; s < B; ++s) {
        double f = o1(0, s) - o2(0, s);
        epoch_data += -log_sigmoid(f);
        dldf(0, s) = (sigmoid(f) - 1.0) / double(B);
      }
      grads.set_zero();
      net.backward_batch(t1, dldf, grads);
      net.backward_batch(t2, -dldf, grads);
      // regularizer gradient scaled to the per-sample objective
      const double reg_scale = 2.0 / (W * double(count));
      for (size_t l = 0; l < grads.w.size(); ++l) {
        grads.w[l] += reg_scale * net.weights()[l];
        grads.b[l] += reg_scale * net.biases()[l];
      }
      adam.update(net, grads);
    }
    double epoch_loss = epoch_data + net.squared_norm() / W;
    if (!std::isfinite(epoch_loss))
      fail(ErrorCode::numeric, "neural kernel fit diverged at epoch " +
                                   std::to_string(epoch + 1) + " (non-finite loss)");
    if (epoch == 0) first_epoch_loss = epoch_loss;
    last_epoch_loss = epoch_loss;
  }

  // resample the antisymmetrized log-odds onto the grid
  const int L = grid->order();
  Eigen::MatrixXd gvals(L, L);
  Eigen::MatrixXd in(2, L * L);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) {
      in(0, i * L + j) = grid->nodes()[i];
      in(1, i * L + j) = grid->nodes()[j];
    }
  Eigen::MatrixXd out = net.forward_batch(in, nullptr);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) gvals(i, j) = out(0, i * L + j);
  Eigen::MatrixXd f = gvals - gvals.transpose();

  if (info) {
    info->samples = count;
    info->initial_loss = first_epoch_loss;
    info->final_loss = last_epoch_loss;
    info->regularizer = net.squared_norm() / W;
  }
  return Kernel(grid, f);
}

}  // namespace pairrank
