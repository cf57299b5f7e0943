#include "pairrank/em.hpp"

#include <cmath>
#include <optional>
#include <string>

#include "pairrank/error.hpp"
#include "pairrank/rng.hpp"

namespace pairrank {

QGrid accumulate_q(const WinMatrix& w, const MessageSet& msgs, const Kernel& kernel) {
  const int L = kernel.grid().order();
  if (msgs.to_a.size() != w.edges().size())
    fail(ErrorCode::invalid_argument, "message set does not match the win matrix");
  QGrid q;
  q.values = Eigen::MatrixXd::Zero(L, L);
  q.total_weight = double(w.total_matches());
  for (size_t e = 0; e < w.edges().size(); ++e) {
    const Edge& edge = w.edges()[e];
    Eigen::MatrixXd joint = bp_joint_marginal(msgs, w, kernel, edge.a, edge.b);
    if (edge.wins_ab > 0) q.values += double(edge.wins_ab) * joint;
    if (edge.wins_ba > 0) q.values += double(edge.wins_ba) * joint.transpose();
  }
  return q;
}

namespace {

// Bethe entropy of the belief set: sum of pairwise joint entropies minus
// (degree - 1) times each marginal entropy. Together with the data term and
// the kernel prior it forms the variational lower bound on the penalized
// log evidence; exact on trees.
double bethe_entropy(const WinMatrix& w, const MessageSet& msgs, const Kernel& kernel) {
  const auto& grid = kernel.grid();
  auto ent = [](double v) { return v > 1e-300 ? -v * std::log(v) : 0.0; };
  double total = 0.0;
  for (const Edge& e : w.edges()) {
    Eigen::MatrixXd joint = bp_joint_marginal(msgs, w, kernel, e.a, e.b);
    total += grid.integrate2d(joint.unaryExpr(ent));
  }
  for (int i = 0; i < w.num_players(); ++i) {
    const int deg = int(w.incident_edges(i).size());
    if (deg <= 1) continue;
    Eigen::VectorXd mu = bp_marginal(msgs, w, kernel, i);
    total -= double(deg - 1) * grid.integrate(mu.unaryExpr(ent));
  }
  return total;
}

// one M-step driver per backend, persisting warm-start state across calls
class ChebBackend {
 public:
  ChebBackend(cheb::GridPtr grid, const ChebMStepOptions& opts) : step_(std::move(grid), opts) {}

  Kernel fit(const QGrid& q, const Kernel& current, double* regularizer) {
    if (!params_) params_ = step_.warm_start(current);
    ChebFitInfo info;
    Kernel next = step_.fit(q, *params_, &info);
    *regularizer = info.regularizer;
    return next;
  }

 private:
  ChebMStep step_;
  std::optional<MonotoneParams> params_;
};

class NeuralBackend {
 public:
  NeuralBackend(cheb::GridPtr grid, const NNTrainOptions& opts, uint64_t seed)
      : grid_(std::move(grid)), opts_(opts), seed_(seed) {
    std::vector<int> sizes;
    sizes.push_back(2);
    for (int h : opts_.hidden) sizes.push_back(h);
    sizes.push_back(1);
    net_.emplace(sizes, derive_seed(seed_, 0));
  }

  Kernel fit(const QGrid& q, int iteration, double* regularizer) {
    NNTrainOptions opts = opts_;
    opts.seed = derive_seed(seed_, uint64_t(iteration));  // fresh samples per iteration
    NNFitInfo info;
    Kernel next = fit_kernel_nn(q, grid_, *net_, opts, &info);
    *regularizer = -info.regularizer;  // enters the maximized objective negatively
    return next;
  }

 private:
  cheb::GridPtr grid_;
  NNTrainOptions opts_;
  uint64_t seed_;
  std::optional<MLP> net_;
};

}  // namespace

FitResult em_fit(std::shared_ptr<const WinMatrix> w, const EMOptions& opts) {
  if (!w) fail(ErrorCode::invalid_argument, "null win matrix");
  if (opts.max_iters < 1) fail(ErrorCode::invalid_argument, "em max_iters must be >= 1");
  if (!(opts.kernel_tol > 0.0)) fail(ErrorCode::invalid_argument, "em kernel_tol must be > 0");

  cheb::GridPtr grid = cheb::make_grid(opts.grid_order);
  Kernel kernel = Kernel::logistic(grid, opts.baseline_slope);
  EMState state;

  if (w->total_matches() == 0) {
    MessageSet msgs = run_bp(*w, kernel, opts.bp);
    Posterior post = Posterior::compute(w, kernel, std::move(msgs));
    return FitResult{std::move(kernel), std::move(post), std::move(state)};
  }

  std::optional<ChebBackend> cheb_backend;
  std::optional<NeuralBackend> nn_backend;
  if (opts.backend == Backend::chebyshev)
    cheb_backend.emplace(grid, opts.cheb);
  else
    nn_backend.emplace(grid, opts.nn, opts.seed);

  MessageSet msgs;
  bool have_msgs = false;
  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    msgs = run_bp(*w, kernel, opts.bp, (have_msgs && opts.warm_start_bp) ? &msgs : nullptr);
    have_msgs = true;
    state.bp_sweeps.push_back(msgs.sweeps);

    QGrid q = accumulate_q(*w, msgs, kernel);
    double regularizer = 0.0;
    Kernel next = [&]() {
      try {
        return cheb_backend ? cheb_backend->fit(q, kernel, &regularizer)
                            : nn_backend->fit(q, iter, &regularizer);
      } catch (const Error& e) {
        throw Error(e.code(), "EM iteration " + std::to_string(iter) + ": " + e.what());
      }
    }();

    double data = grid->integrate2d(q.values.cwiseProduct(next.log_node_values()));
    double entropy = bethe_entropy(*w, msgs, kernel);
    state.bound_trace.push_back((data + entropy + regularizer) /
                                std::max(1.0, q.total_weight));
    state.kernel_delta =
        (next.node_values() - kernel.node_values()).cwiseAbs().maxCoeff();
    kernel = std::move(next);
    state.iterations = iter;
    if (state.kernel_delta < opts.kernel_tol) {
      state.converged = true;
      break;
    }
  }

  msgs = run_bp(*w, kernel, opts.bp, (have_msgs && opts.warm_start_bp) ? &msgs : nullptr);
  Posterior post = Posterior::compute(w, kernel, std::move(msgs));
  return FitResult{std::move(kernel), std::move(post), std::move(state)};
}

}  // namespace pairrank
