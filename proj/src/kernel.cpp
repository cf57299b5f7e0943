#include "pairrank/kernel.hpp"

#include <cmath>

#include "pairrank/error.hpp"

namespace pairrank {

double clamp_probability(double p) {
  if (p < Kernel::kProbFloor) return Kernel::kProbFloor;
  if (p > 1.0 - Kernel::kProbFloor) return 1.0 - Kernel::kProbFloor;
  return p;
}

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

Kernel::Kernel(cheb::GridPtr grid, const Eigen::MatrixXd& f_node_values)
    : grid_(std::move(grid)) {
  const int L = grid_->order();
  if (f_node_values.rows() != L || f_node_values.cols() != L)
    fail(ErrorCode::invalid_argument, "kernel node grid shape does not match grid order");
  if (!f_node_values.allFinite())
    fail(ErrorCode::numeric, "kernel log-odds contain non-finite values");
  f_ = 0.5 * (f_node_values - f_node_values.transpose());
  b_.resize(L, L);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) b_(i, j) = clamp_probability(sigmoid(f_(i, j)));
  log_b_ = b_.array().log().matrix();
  f_fun_ = cheb::vals_to_fun2d(f_, *grid_);
}

Kernel Kernel::logistic(cheb::GridPtr grid, double slope) {
  const int L = grid->order();
  const Eigen::VectorXd& x = grid->nodes();
  Eigen::MatrixXd f(L, L);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) f(i, j) = slope * (x[i] - x[j]);
  return Kernel(std::move(grid), f);
}

Kernel Kernel::from_win_probability(cheb::GridPtr grid,
                                    const std::function<double(double, double)>& b) {
  const int L = grid->order();
  const Eigen::VectorXd& x = grid->nodes();
  Eigen::MatrixXd f(L, L);
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < L; ++j) {
      double p = clamp_probability(b(x[i], x[j]));
      f(i, j) = std::log(p) - std::log1p(-p);
    }
  }
  return Kernel(std::move(grid), f);
}

double Kernel::eval(double x, double y) const {
  return clamp_probability(sigmoid(f_fun_.eval(x, y)));
}

}  // namespace pairrank
