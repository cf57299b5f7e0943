#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace pairrank {

// Fully connected feed-forward network with ReLU hidden layers and a
// linear scalar output. Weights and biases are initialized uniformly with
// fan-in scaling from the given seed, so runs are reproducible.
class MLP {
 public:
  // layer_sizes = {in, hidden..., out}, e.g. {2, 64, 64, 1}
  MLP(std::vector<int> layer_sizes, uint64_t seed);

  const std::vector<int>& layer_sizes() const { return sizes_; }
  int num_layers() const { return int(weights_.size()); }

  std::vector<Eigen::MatrixXd>& weights() { return weights_; }
  std::vector<Eigen::VectorXd>& biases() { return biases_; }
  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& biases() const { return biases_; }

  int64_t num_parameters() const;
  double squared_norm() const;

  // scalar forward for a 2-input network
  double forward(double x, double y) const;
  // antisymmetrized output f(x,y) = g(x,y) - g(y,x); zero at x == y exactly
  double antisym(double x, double y) const { return forward(x, y) - forward(y, x); }

  struct Tape {
    std::vector<Eigen::MatrixXd> acts;  // acts[0] = input, acts[l+1] = layer output
  };
  struct Grads {
    std::vector<Eigen::MatrixXd> w;
    std::vector<Eigen::VectorXd> b;
    void set_zero();
    void axpy(double alpha, const Grads& other);
  };
  Grads zero_grads() const;

  // input is (in x batch); returns the (out x batch) output
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& input, Tape* tape) const;
  // dout is (out x batch); accumulates into grads
  void backward_batch(const Tape& tape, const Eigen::MatrixXd& dout, Grads& grads) const;

 private:
  std::vector<int> sizes_;
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
};

// Adam with the canonical published defaults; minimizes.
class Adam {
 public:
  Adam(const MLP& net, double step = 1e-3, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8);
  void update(MLP& net, const MLP::Grads& grads);

 private:
  double step_, beta1_, beta2_, eps_;
  int64_t t_ = 0;
  MLP::Grads m_, v_;
};

}  // namespace pairrank
