#include "pairrank/mstep_cheb.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "pairrank/error.hpp"

namespace pairrank {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// blocks with less p-norm mass than this are treated as flat; their node
// contribution is below 1e-7, under every tolerance in play
constexpr double kBlockFloor = 1e-60;

double ipow(double x, int n) {
  double r = 1.0, b = x;
  while (n > 0) {
    if (n & 1) r *= b;
    b *= b;
    n >>= 1;
  }
  return r;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

double log_sigmoid(double z) {
  if (z >= 0.0) return -std::log1p(std::exp(-z));
  return z - std::log1p(std::exp(z));
}

}  // namespace

struct ChebMStep::PairView {
  Eigen::MatrixXd H;  // |g|^p on the strict upper triangle
  Eigen::MatrixXd S;  // block sums S(m,k), strict upper
  Eigen::VectorXd r;  // S^(1/p) per pair
  Eigen::MatrixXd F;  // antisymmetric node values

  void build(const Eigen::MatrixXd& g, int p, int L, const Eigen::VectorXi& pair_row,
             const Eigen::VectorXi& pair_col) {
    H = Eigen::MatrixXd::Zero(L, L);
    for (int i = 0; i < L; ++i)
      for (int j = i + 1; j < L; ++j) H(i, j) = ipow(std::abs(g(i, j)), p);

    // S(a,b) = S(a+1,b) + sum_{j=a+1..b} H(a,j)
    S = Eigen::MatrixXd::Zero(L, L);
    for (int a = L - 1; a >= 0; --a) {
      double row = 0.0;
      for (int b = a + 1; b < L; ++b) {
        row += H(a, b);
        S(a, b) = (a + 1 < b ? S(a + 1, b) : 0.0) + row;
      }
    }

    const int P = int(pair_row.size());
    r.resize(P);
    F = Eigen::MatrixXd::Zero(L, L);
    for (int e = 0; e < P; ++e) {
      const int m = pair_row[e], k = pair_col[e];
      double root = std::pow(S(m, k), 1.0 / p);
      r[e] = root;
      F(k, m) = root;   // stronger first argument -> positive log-odds
      F(m, k) = -root;  // exact antisymmetry by construction
    }
  }
};

ChebMStep::ChebMStep(cheb::GridPtr grid, ChebMStepOptions opts)
    : grid_(std::move(grid)), opts_(opts) {
  if (opts_.p < 2 || opts_.p % 2 != 0)
    fail(ErrorCode::invalid_argument, "monotone p must be a positive even integer");
  if (!(opts_.penalty_scale >= 0.0))
    fail(ErrorCode::invalid_argument, "penalty scale must be non-negative");
  const int L = grid_->order();
  quad2_ = grid_->quad_weights() * grid_->quad_weights().transpose();

  const int P = L * (L - 1) / 2;
  pair_row_.resize(P);
  pair_col_.resize(P);
  pair_index_ = Eigen::MatrixXi::Constant(L, L, -1);
  int t = 0;
  for (int m = 0; m < L; ++m) {
    for (int k = m + 1; k < L; ++k) {
      pair_row_[t] = m;
      pair_col_[t] = k;
      pair_index_(m, k) = t;
      ++t;
    }
  }

  // Penalty Hessian over pair space. With F = sum_e r_e (E_km - E_mk) the
  // penalty is -scale * || lam .o (A F A^T) ||_F^2, a quadratic form in r;
  // its Hessian is the negated scaled Gram matrix of the per-pair images.
  const Eigen::MatrixXd& A = grid_->vals_to_coeffs();
  Eigen::MatrixXd images(P, L * L);
  for (int e = 0; e < P; ++e) {
    const int m = pair_row_[e], k = pair_col_[e];
    Eigen::MatrixXd C =
        A.col(k) * A.col(m).transpose() - A.col(m) * A.col(k).transpose();
    for (int a = 0; a < L; ++a)
      for (int b = 0; b < L; ++b) C(a, b) *= double(a) * a + double(b) * b;
    images.row(e) = Eigen::Map<const Eigen::VectorXd>(C.data(), L * L).transpose();
  }
  penalty_hess_.noalias() = -2.0 * opts_.penalty_scale * (images * images.transpose());
}

Eigen::MatrixXd ChebMStep::monotone_values(const MonotoneParams& params) const {
  const int L = grid_->order();
  if (params.g.rows() != L || params.g.cols() != L)
    fail(ErrorCode::invalid_argument, "parameter grid shape does not match grid order");
  if (params.p < 1) fail(ErrorCode::invalid_argument, "monotone p must be >= 1");
  PairView pv;
  pv.build(params.g, params.p, L, pair_row_, pair_col_);
  return pv.F;
}

double ChebMStep::penalty(const Eigen::MatrixXd& f_vals) const {
  cheb::ChebFun2D f = cheb::vals_to_fun2d(f_vals, *grid_);
  const int L = grid_->order();
  double acc = 0.0;
  for (int a = 0; a < L; ++a) {
    for (int b = 0; b < L; ++b) {
      double term = (double(a) * a + double(b) * b) * f.coeffs(a, b);
      acc += term * term;
    }
  }
  return -opts_.penalty_scale * acc;
}

double ChebMStep::objective(const QGrid& q, const MonotoneParams& params) const {
  const int L = grid_->order();
  if (q.values.rows() != L || q.values.cols() != L)
    fail(ErrorCode::invalid_argument, "Q grid shape does not match grid order");
  PairView pv;
  pv.build(params.g, params.p, L, pair_row_, pair_col_);
  if (!pv.F.allFinite()) return -kInf;

  double data = 0.0;
  for (int k = 0; k < L; ++k)
    for (int m = 0; m < L; ++m)
      data += quad2_(k, m) * q.values(k, m) * log_sigmoid(pv.F(k, m));
  double pen = 0.5 * pv.r.dot(penalty_hess_ * pv.r);
  double total = data + pen;
  return std::isfinite(total) ? total : -kInf;
}

void ChebMStep::derivatives(const QGrid& q, const MonotoneParams& params,
                            const PairView& pv, Eigen::VectorXd* grad,
                            Eigen::MatrixXd* hess) const {
  const int L = grid_->order();
  const int P = num_pairs();
  const int p = params.p;

  Eigen::MatrixXd dD(L, L), dD2(L, L);
  for (int k = 0; k < L; ++k) {
    for (int m = 0; m < L; ++m) {
      double s = sigmoid(pv.F(k, m));
      double wq = quad2_(k, m) * q.values(k, m);
      dD(k, m) = wq * (1.0 - s);
      dD2(k, m) = -wq * s * (1.0 - s);
    }
  }
  Eigen::VectorXd pen_grad = penalty_hess_ * pv.r;

  // pair-space gradient and the dr/dS scale of every block
  Eigen::VectorXd gr(P), drdS(P);
  for (int e = 0; e < P; ++e) {
    const int m = pair_row_[e], k = pair_col_[e];
    gr[e] = dD(k, m) - dD(m, k) + pen_grad[e];
    const double S = pv.S(m, k);
    drdS[e] = S > kBlockFloor ? std::pow(S, 1.0 / p - 1.0) / p : 0.0;
  }

  if (grad) {
    // dJ/dg_ij collects every pair (m,k) with m <= i < j <= k: a prefix-in-m,
    // suffix-in-k cumulative sum over T(m,k) = gr * dr/dS * dS/dH
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(L, L);
    for (int e = 0; e < P; ++e)
      T(pair_row_[e], pair_col_[e]) = gr[e] * drdS[e] * p;
    Eigen::MatrixXd U = T;
    for (int m = 1; m < L; ++m) U.row(m) += U.row(m - 1);
    for (int k = L - 2; k >= 0; --k) U.col(k) += U.col(k + 1);
    for (int e = 0; e < P; ++e)
      (*grad)[e] =
          U(pair_row_[e], pair_col_[e]) * ipow(params.g(pair_row_[e], pair_col_[e]), p - 1);
  }

  if (hess) {
    Eigen::MatrixXd Jr = Eigen::MatrixXd::Zero(P, P);
    for (int e = 0; e < P; ++e) {
      if (drdS[e] == 0.0) continue;
      const int m = pair_row_[e], k = pair_col_[e];
      for (int i = m; i < k; ++i)
        for (int j = i + 1; j <= k; ++j)
          Jr(e, pair_index_(i, j)) = drdS[e] * p * ipow(params.g(i, j), p - 1);
    }
    Eigen::MatrixXd Hr = penalty_hess_;
    for (int e = 0; e < P; ++e) {
      const int m = pair_row_[e], k = pair_col_[e];
      Hr(e, e) += dD2(k, m) + dD2(m, k);
    }
    hess->noalias() = Jr.transpose() * Hr * Jr;

    // curvature of each block root r_e = S_e^(1/p)
    std::vector<int> block;
    block.reserve(size_t(P));
    Eigen::VectorXd v(P);
    for (int t = 0; t < P; ++t)
      v[t] = double(p) * ipow(params.g(pair_row_[t], pair_col_[t]), p - 1);
    for (int e = 0; e < P; ++e) {
      const int m = pair_row_[e], k = pair_col_[e];
      const double S = pv.S(m, k);
      if (S <= kBlockFloor) continue;
      const double c1 = gr[e] * (1.0 / p) * (1.0 / p - 1.0) * std::pow(S, 1.0 / p - 2.0);
      const double c2 = gr[e] * (1.0 / p) * std::pow(S, 1.0 / p - 1.0);
      block.clear();
      for (int i = m; i < k; ++i)
        for (int j = i + 1; j <= k; ++j) block.push_back(pair_index_(i, j));
      for (int t : block)
        (*hess)(t, t) += c2 * double(p) * double(p - 1) *
                         ipow(params.g(pair_row_[t], pair_col_[t]), p - 2);
      for (size_t a = 0; a < block.size(); ++a) {
        const double va = c1 * v[block[a]];
        for (size_t b = 0; b < block.size(); ++b)
          (*hess)(block[a], block[b]) += va * v[block[b]];
      }
    }
  }
}

Eigen::MatrixXd ChebMStep::gradient(const QGrid& q, const MonotoneParams& params) const {
  const int L = grid_->order();
  if (q.values.rows() != L || q.values.cols() != L)
    fail(ErrorCode::invalid_argument, "Q grid shape does not match grid order");
  PairView pv;
  pv.build(params.g, params.p, L, pair_row_, pair_col_);
  Eigen::VectorXd gv(num_pairs());
  derivatives(q, params, pv, &gv, nullptr);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(L, L);
  for (int e = 0; e < num_pairs(); ++e) out(pair_row_[e], pair_col_[e]) = gv[e];
  return out;
}

Eigen::MatrixXd ChebMStep::hessian(const QGrid& q, const MonotoneParams& params) const {
  PairView pv;
  pv.build(params.g, params.p, grid_->order(), pair_row_, pair_col_);
  Eigen::MatrixXd h(num_pairs(), num_pairs());
  derivatives(q, params, pv, nullptr, &h);
  return h;
}

namespace {

// Invert the block-sum structure: given target block sums S(m,k) (as a
// callable on m < k), H is the mixed second difference of the table and the
// parameters are its p-th roots. Negative differences (unrepresentable
// surfaces) clamp to a small positive floor.
template <typename TableFn>
MonotoneParams params_from_block_sums(int L, int p, const TableFn& V) {
  MonotoneParams params;
  params.p = p;
  params.g = Eigen::MatrixXd::Zero(L, L);
  for (int i = 0; i < L; ++i)
    for (int j = i + 1; j < L; ++j) {
      double h = V(i, j) - V(i + 1, j) - V(i, j - 1) + V(i + 1, j - 1);
      params.g(i, j) = std::pow(std::max(h, 1e-40), 1.0 / p);
    }
  return params;
}

}  // namespace

MonotoneParams ChebMStep::warm_start(const Kernel& current) const {
  const int L = grid_->order();
  const int p = opts_.p;
  const Eigen::MatrixXd& f = current.f_node_values();
  auto V = [&](int a, int b) -> double {
    if (a >= b) return 0.0;
    return ipow(std::max(f(b, a), 0.0), p);
  };
  return params_from_block_sums(L, p, V);
}

// Unconstrained concave maximization over the pair roots r (F is linear in
// r, the data term is concave in F and the penalty is a negative quadratic),
// ignoring the cone constraint that r must be a block p-norm. Used to warm
// start the g-space polish near the optimum.
Eigen::VectorXd ChebMStep::solve_pair_roots(const QGrid& q, Eigen::VectorXd r) const {
  const int L = grid_->order();
  const int P = num_pairs();

  auto value = [&](const Eigen::VectorXd& rv) {
    double data = 0.0;
    for (int e = 0; e < P; ++e) {
      const int m = pair_row_[e], k = pair_col_[e];
      data += quad2_(k, m) * q.values(k, m) * log_sigmoid(rv[e]) +
              quad2_(m, k) * q.values(m, k) * log_sigmoid(-rv[e]);
    }
    // diagonal cells: F = 0 regardless of r
    for (int k = 0; k < L; ++k)
      data += quad2_(k, k) * q.values(k, k) * log_sigmoid(0.0);
    return data + 0.5 * rv.dot(penalty_hess_ * rv);
  };

  double J = value(r);
  for (int iter = 0; iter < 100; ++iter) {
    Eigen::VectorXd grad(P);
    Eigen::MatrixXd hess = penalty_hess_;
    for (int e = 0; e < P; ++e) {
      const int m = pair_row_[e], k = pair_col_[e];
      const double s = sigmoid(r[e]);
      const double wkm = quad2_(k, m) * q.values(k, m);
      const double wmk = quad2_(m, k) * q.values(m, k);
      grad[e] = wkm * (1.0 - s) - wmk * s;
      hess(e, e) += -(wkm + wmk) * s * (1.0 - s);
    }
    grad += penalty_hess_ * r;
    if (grad.lpNorm<Eigen::Infinity>() <= 1e-12 * std::max(1.0, q.total_weight)) break;

    Eigen::VectorXd d;
    Eigen::MatrixXd A = -hess;
    for (double tau = 0.0;; tau = (tau == 0.0 ? 1e-12 : tau * 100.0)) {
      Eigen::LLT<Eigen::MatrixXd> llt(A);
      if (llt.info() == Eigen::Success) {
        d = llt.solve(grad);
        if (d.allFinite() && d.dot(grad) > 0.0) break;
      }
      if (tau > 1e12) return r;
      A.diagonal().array() += tau;
    }
    double alpha = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 50; ++ls) {
      double Jt = value(r + alpha * d);
      if (Jt >= J + 1e-4 * alpha * d.dot(grad)) {
        r += alpha * d;
        J = Jt;
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) break;
  }
  return r;
}

Kernel ChebMStep::fit(const QGrid& q, MonotoneParams& params, ChebFitInfo* info) const {
  const int L = grid_->order();
  const int P = num_pairs();
  const int p = opts_.p;
  params.p = p;
  if (params.g.rows() != L || params.g.cols() != L)
    fail(ErrorCode::invalid_argument, "warm-start parameter shape does not match grid order");
  if (q.values.rows() != L || q.values.cols() != L)
    fail(ErrorCode::invalid_argument, "Q grid shape does not match grid order");
  if (!q.values.allFinite() || q.values.minCoeff() < 0.0)
    fail(ErrorCode::invalid_argument, "Q grid must be non-negative and finite");
  const double gtol =
      opts_.grad_tol > 0.0 ? opts_.grad_tol : 1e-9 * std::max(1.0, q.total_weight);

  double J = objective(q, params);
  if (J == -kInf) fail(ErrorCode::numeric, "kernel fit started from a non-finite objective");

  // Solve the concave relaxation over pair roots, pull the solution back
  // into parameter space and keep it when it does not lose ground (the
  // pull-back clamps blocks the monotone cone cannot represent).
  if (P > 0) {
    PairView pv;
    pv.build(params.g, p, L, pair_row_, pair_col_);
    Eigen::VectorXd roots = solve_pair_roots(q, pv.r);
    Eigen::MatrixXd Stab = Eigen::MatrixXd::Zero(L, L);
    for (int e = 0; e < P; ++e)
      Stab(pair_row_[e], pair_col_[e]) = ipow(std::max(roots[e], 0.0), p);
    auto V = [&](int a, int b) -> double { return a >= b ? 0.0 : Stab(a, b); };
    MonotoneParams candidate = params_from_block_sums(L, p, V);
    double Jc = objective(q, candidate);
    if (Jc >= J) {
      params = std::move(candidate);
      J = Jc;
    }
  }

  double gnorm = 0.0;
  int iter = 0;
  int stalled = 0;
  Eigen::VectorXd grad(P);
  Eigen::MatrixXd hess(P, P);
  for (iter = 0; iter < opts_.max_iters && P > 0; ++iter) {
    PairView pv;
    pv.build(params.g, p, L, pair_row_, pair_col_);
    derivatives(q, params, pv, &grad, &hess);

    gnorm = grad.lpNorm<Eigen::Infinity>();
    if (gnorm <= gtol) break;

    // ascent direction: ridge-regularized Newton, steepest-ascent fallback
    Eigen::VectorXd dir;
    bool have_dir = false;
    double ridge_base = std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
    for (double tau = 0.0; tau <= 1e8 * ridge_base;
         tau = (tau == 0.0 ? 1e-10 * ridge_base : tau * 10.0)) {
      Eigen::MatrixXd A = -hess;
      A.diagonal().array() += tau;
      Eigen::LLT<Eigen::MatrixXd> llt(A);
      if (llt.info() == Eigen::Success) {
        dir = llt.solve(grad);
        if (dir.allFinite() && dir.dot(grad) > 0.0) {
          have_dir = true;
          break;
        }
      }
    }

    double used_alpha = 0.0;
    auto try_direction = [&](const Eigen::VectorXd& d) -> bool {
      const double slope = d.dot(grad);
      if (!(slope > 0.0)) return false;
      double alpha = 1.0;
      for (int ls = 0; ls < 60; ++ls) {
        MonotoneParams trial = params;
        for (int e = 0; e < P; ++e)
          trial.g(pair_row_[e], pair_col_[e]) += alpha * d[e];
        double Jt = objective(q, trial);
        if (Jt >= J + 1e-4 * alpha * slope) {
          params = std::move(trial);
          J = Jt;
          used_alpha = alpha;
          return true;
        }
        alpha *= 0.5;
      }
      return false;
    };

    const double J_before = J;
    bool moved = have_dir && try_direction(dir);
    if (!moved) moved = try_direction(grad / std::max(1.0, gnorm));
    if (!moved) {
      // step-size underflow: legitimate at stationary points and at the
      // non-smooth cone boundary, a genuine failure when the gradient is
      // still large on the problem scale
      if (gnorm > 1e-2 * std::max(1.0, q.total_weight))
        fail(ErrorCode::numeric,
             "kernel fit stalled after retries: |grad|_inf = " + std::to_string(gnorm));
      break;
    }

    if (opts_.trace)
      std::fprintf(stderr, "  mstep iter %d J=%.10g |g|=%.3g newton=%d alpha=%.3g\n",
                   iter + 1, J, gnorm, int(have_dir), used_alpha);

    // objective converged to floating-point resolution
    if (J - J_before <= 1e-13 * std::max(1.0, std::abs(J))) {
      if (++stalled >= 3) break;
    } else {
      stalled = 0;
    }
  }

  if (info) {
    PairView pv;
    pv.build(params.g, p, L, pair_row_, pair_col_);
    info->iterations = iter;
    info->objective = J;
    info->grad_norm = gnorm;
    info->regularizer = 0.5 * pv.r.dot(penalty_hess_ * pv.r);
  }
  return Kernel(grid_, monotone_values(params));
}

}  // namespace pairrank
