#include "pairrank/mlp.hpp"

#include <cmath>

#include "pairrank/error.hpp"
#include "pairrank/rng.hpp"

namespace pairrank {

MLP::MLP(std::vector<int> layer_sizes, uint64_t seed) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) fail(ErrorCode::invalid_argument, "network needs >= 2 layers");
  for (int s : sizes_)
    if (s < 1) fail(ErrorCode::invalid_argument, "layer sizes must be positive");
  Rng rng(seed);
  for (size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const int n_in = sizes_[l], n_out = sizes_[l + 1];
    const double bound = 1.0 / std::sqrt(double(n_in));
    Eigen::MatrixXd w(n_out, n_in);
    Eigen::VectorXd b(n_out);
    for (int i = 0; i < n_out; ++i) {
      for (int j = 0; j < n_in; ++j) w(i, j) = bound * (2.0 * rng.next_double() - 1.0);
      b[i] = bound * (2.0 * rng.next_double() - 1.0);
    }
    weights_.push_back(std::move(w));
    biases_.push_back(std::move(b));
  }
}

int64_t MLP::num_parameters() const {
  int64_t n = 0;
  for (size_t l = 0; l < weights_.size(); ++l)
    n += weights_[l].size() + biases_[l].size();
  return n;
}

double MLP::squared_norm() const {
  double s = 0.0;
  for (size_t l = 0; l < weights_.size(); ++l)
    s += weights_[l].squaredNorm() + biases_[l].squaredNorm();
  return s;
}

double MLP::forward(double x, double y) const {
  Eigen::MatrixXd in(2, 1);
  in << x, y;
  return forward_batch(in, nullptr)(0, 0);
}

Eigen::MatrixXd MLP::forward_batch(const Eigen::MatrixXd& input, Tape* tape) const {
  if (input.rows() != sizes_.front())
    fail(ErrorCode::invalid_argument, "input rows do not match the network input size");
  Eigen::MatrixXd a = input;
  if (tape) {
    tape->acts.clear();
    tape->acts.push_back(a);
  }
  const int last = num_layers() - 1;
  for (int l = 0; l <= last; ++l) {
    Eigen::MatrixXd z = (weights_[size_t(l)] * a).colwise() + biases_[size_t(l)];
    a = (l == last) ? z : z.cwiseMax(0.0);
    if (tape) tape->acts.push_back(a);
  }
  return a;
}

void MLP::backward_batch(const Tape& tape, const Eigen::MatrixXd& dout, Grads& grads) const {
  const int last = num_layers() - 1;
  Eigen::MatrixXd da = dout;
  for (int l = last; l >= 0; --l) {
    // ReLU layers stored post-activation: the mask is act > 0
    Eigen::MatrixXd dz = (l == last)
                             ? da
                             : (da.array() * (tape.acts[size_t(l + 1)].array() > 0.0).cast<double>())
                                   .matrix();
    grads.w[size_t(l)].noalias() += dz * tape.acts[size_t(l)].transpose();
    grads.b[size_t(l)] += dz.rowwise().sum();
    if (l > 0) da.noalias() = weights_[size_t(l)].transpose() * dz;
  }
}

MLP::Grads MLP::zero_grads() const {
  Grads g;
  for (size_t l = 0; l < weights_.size(); ++l) {
    g.w.push_back(Eigen::MatrixXd::Zero(weights_[l].rows(), weights_[l].cols()));
    g.b.push_back(Eigen::VectorXd::Zero(biases_[l].size()));
  }
  return g;
}

void MLP::Grads::set_zero() {
  for (auto& m : w) m.setZero();
  for (auto& v : b) v.setZero();
}

void MLP::Grads::axpy(double alpha, const Grads& other) {
  for (size_t l = 0; l < w.size(); ++l) {
    w[l] += alpha * other.w[l];
    b[l] += alpha * other.b[l];
  }
}

Adam::Adam(const MLP& net, double step, double beta1, double beta2, double eps)
    : step_(step), beta1_(beta1), beta2_(beta2), eps_(eps) {
  m_ = net.zero_grads();
  v_ = net.zero_grads();
}

void Adam::update(MLP& net, const MLP::Grads& grads) {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, double(t_));
  const double bc2 = 1.0 - std::pow(beta2_, double(t_));
  for (size_t l = 0; l < m_.w.size(); ++l) {
    m_.w[l] = beta1_ * m_.w[l] + (1.0 - beta1_) * grads.w[l];
    v_.w[l] = beta2_ * v_.w[l] + (1.0 - beta2_) * grads.w[l].cwiseProduct(grads.w[l]);
    net.weights()[l].array() -=
        step_ * (m_.w[l].array() / bc1) / ((v_.w[l].array() / bc2).sqrt() + eps_);

    m_.b[l] = beta1_ * m_.b[l] + (1.0 - beta1_) * grads.b[l];
    v_.b[l] = beta2_ * v_.b[l] + (1.0 - beta2_) * grads.b[l].cwiseProduct(grads.b[l]);
    net.biases()[l].array() -=
        step_ * (m_.b[l].array() / bc1) / ((v_.b[l].array() / bc2).sqrt() + eps_);
  }
}

}  // namespace pairrank
