#include "pairrank/cheb.hpp"

#include <cmath>

#include "pairrank/error.hpp"

namespace pairrank::cheb {

namespace {

constexpr double kPi = 3.14159265358979323846;

// integral of T_n over [-1,1]
double cheb_integral(int n) {
  if (n == 1) return 0.0;
  if (n % 2 != 0) return 0.0;
  return 2.0 / (1.0 - double(n) * double(n));
}

// Clenshaw recurrence for sum_a c[a] T_a(t), t in [-1,1]
double clenshaw(const Eigen::VectorXd& c, double t) {
  const int n = int(c.size());
  double b1 = 0.0, b2 = 0.0;
  for (int a = n - 1; a >= 1; --a) {
    double b0 = c[a] + 2.0 * t * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return c[0] + t * b1 - b2;
}

double clamp_to_t(double x) {
  if (x < 0.0) x = 0.0;
  if (x > 1.0) x = 1.0;
  return 2.0 * x - 1.0;
}

}  // namespace

ChebGrid::ChebGrid(int order) : order_(order) {
  if (order < 1) fail(ErrorCode::invalid_argument, "grid order must be >= 1");
  const int L = order;
  nodes_.resize(L);
  c2v_.resize(L, L);
  v2c_.resize(L, L);
  for (int k = 0; k < L; ++k) {
    const double theta = (k + 0.5) * kPi / L;
    nodes_[k] = 0.5 - 0.5 * std::cos(theta);
    // t_k = 2 node - 1 = -cos(theta), so T_a(t_k) = (-1)^a cos(a theta)
    for (int a = 0; a < L; ++a) {
      const double sign = (a % 2 == 0) ? 1.0 : -1.0;
      c2v_(k, a) = sign * std::cos(a * theta);
    }
  }
  // discrete orthogonality of first-kind nodes
  for (int a = 0; a < L; ++a) {
    const double scale = (a == 0 ? 1.0 : 2.0) / L;
    for (int k = 0; k < L; ++k) v2c_(a, k) = scale * c2v_(k, a);
  }
  // w = v2c^T I with I_a = integral of T_a(2x-1) over [0,1]; this is the
  // rule that integrates the degree-<L interpolant exactly (Fejer-type,
  // positive weights)
  Eigen::VectorXd I(L), J(L);
  for (int a = 0; a < L; ++a) {
    I[a] = 0.5 * cheb_integral(a);
    // x = (1 + t)/2 => x T_a = (T_a + (T_{a+1} + T_{|a-1|})/2)/2 on [-1,1]
    double t1 = cheb_integral(a + 1) + cheb_integral(std::abs(a - 1));
    J[a] = 0.5 * (I[a] + 0.25 * t1);
  }
  quad_weights_ = v2c_.transpose() * I;
  moment_weights_ = v2c_.transpose() * J;
}

GridPtr make_grid(int order) { return std::make_shared<const ChebGrid>(order); }

double ChebFun1D::eval(double x) const { return clenshaw(coeffs, clamp_to_t(x)); }

double ChebFun2D::eval(double x, double y) const {
  const double ty = clamp_to_t(y);
  const int L = int(coeffs.rows());
  Eigen::VectorXd row(L);
  for (int a = 0; a < L; ++a) row[a] = clenshaw(coeffs.row(a).transpose(), ty);
  return clenshaw(row, clamp_to_t(x));
}

ChebFun1D vals_to_fun(const Eigen::VectorXd& node_values, const ChebGrid& grid) {
  if (node_values.size() != grid.order())
    fail(ErrorCode::invalid_argument, "value vector length does not match grid order");
  return ChebFun1D{grid.vals_to_coeffs() * node_values};
}

Eigen::VectorXd fun_to_vals(const ChebFun1D& f, const ChebGrid& grid) {
  if (f.coeffs.size() != grid.order())
    fail(ErrorCode::invalid_argument, "coefficient length does not match grid order");
  return grid.coeffs_to_vals() * f.coeffs;
}

ChebFun2D vals_to_fun2d(const Eigen::MatrixXd& node_values, const ChebGrid& grid) {
  if (node_values.rows() != grid.order() || node_values.cols() != grid.order())
    fail(ErrorCode::invalid_argument, "value grid shape does not match grid order");
  return ChebFun2D{grid.vals_to_coeffs() * node_values * grid.vals_to_coeffs().transpose()};
}

Eigen::MatrixXd fun_to_vals2d(const ChebFun2D& f, const ChebGrid& grid) {
  if (f.coeffs.rows() != grid.order() || f.coeffs.cols() != grid.order())
    fail(ErrorCode::invalid_argument, "coefficient grid shape does not match grid order");
  return grid.coeffs_to_vals() * f.coeffs * grid.coeffs_to_vals().transpose();
}

}  // namespace pairrank::cheb
