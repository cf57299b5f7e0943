#include <doctest.h>

#include <cmath>
#include <memory>
#include <sstream>

#include "pairrank/em.hpp"
#include "pairrank/error.hpp"

using namespace pairrank;

namespace {

std::shared_ptr<const WinMatrix> matrix_from(const std::string& text) {
  std::istringstream in(text);
  return std::make_shared<const WinMatrix>(load_matches(in, "inline"));
}

}  // namespace

TEST_SUITE_BEGIN("em");

TEST_CASE("accumulated Q: single pair, unit mass") {
  auto grid = cheb::make_grid(16);
  Kernel k = Kernel::logistic(grid, 5.0);
  auto w = matrix_from("A,B\n");
  MessageSet msgs = run_bp(*w, k, {});
  QGrid q = accumulate_q(*w, msgs, k);
  Eigen::MatrixXd joint = bp_joint_marginal(msgs, *w, k, 0, 1);
  CHECK((q.values - joint).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(grid->integrate2d(q.values) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("accumulated Q integrates to the total match count") {
  auto grid = cheb::make_grid(32);
  Kernel k = Kernel::logistic(grid, 5.0);
  auto w = matrix_from("A,B,3\nB,C,2\nC,A\nD,A,5\nB,D,2\n");
  MessageSet msgs = run_bp(*w, k, {});
  QGrid q = accumulate_q(*w, msgs, k);
  CHECK(q.total_weight == double(w->total_matches()));
  CHECK(grid->integrate2d(q.values) ==
        doctest::Approx(double(w->total_matches())).epsilon(1e-6));
  CHECK(q.values.minCoeff() >= 0.0);
}

TEST_CASE("accumulation is linear in the counts with joints held fixed") {
  auto grid = cheb::make_grid(16);
  Kernel k = Kernel::logistic(grid, 5.0);
  auto w = matrix_from("A,B,2\nB,C\nC,A,4\n");
  MessageSet msgs = run_bp(*w, k, {});

  QGrid q = accumulate_q(*w, msgs, k);
  // rebuild by hand from per-edge joints, then double the counts
  Eigen::MatrixXd manual = Eigen::MatrixXd::Zero(16, 16);
  Eigen::MatrixXd doubled = Eigen::MatrixXd::Zero(16, 16);
  for (const Edge& e : w->edges()) {
    Eigen::MatrixXd joint = bp_joint_marginal(msgs, *w, k, e.a, e.b);
    manual += double(e.wins_ab) * joint + double(e.wins_ba) * joint.transpose();
    doubled += 2.0 * double(e.wins_ab) * joint + 2.0 * double(e.wins_ba) * joint.transpose();
  }
  CHECK((q.values - manual).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((doubled - 2.0 * q.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("fully symmetric data gives a symmetric Q") {
  auto grid = cheb::make_grid(16);
  Kernel k = Kernel::logistic(grid, 5.0);
  auto w = matrix_from("A,B,3\nB,A,3\nB,C,2\nC,B,2\nA,C\nC,A\n");
  MessageSet msgs = run_bp(*w, k, {});
  QGrid q = accumulate_q(*w, msgs, k);
  CHECK((q.values - q.values.transpose()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("empty match set returns the initial guess and a uniform posterior") {
  auto w = matrix_from("");
  EMOptions opts;
  opts.grid_order = 16;
  FitResult fit = em_fit(w, opts);
  Kernel init = Kernel::logistic(cheb::make_grid(16), opts.baseline_slope);
  CHECK((fit.kernel.node_values() - init.node_values()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(fit.state.iterations == 0);
  CHECK(fit.state.bound_trace.empty());

  auto w2 = matrix_from("A,B,0\n");  // players but no matches
  FitResult fit2 = em_fit(w2, opts);
  for (int i = 0; i < 2; ++i)
    CHECK((fit2.posterior.marginal(i).array() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("em runs to convergence on a small data set, deterministic, ascending bound") {
  auto w = matrix_from(
      "A,B,4\nB,C,3\nC,D,5\nA,C,2\nB,D,1\nD,A\nA,D,2\nC,B,1\nB,A,1\n");
  EMOptions opts;
  opts.grid_order = 16;
  opts.max_iters = 12;
  FitResult fit = em_fit(w, opts);
  CHECK(fit.state.iterations >= 1);
  CHECK(!fit.state.bound_trace.empty());
  for (size_t t = 1; t < fit.state.bound_trace.size(); ++t)
    CHECK(fit.state.bound_trace[t] >= fit.state.bound_trace[t - 1] - 1e-3);
  for (double v : fit.state.bound_trace) CHECK(std::isfinite(v));

  // kernel antisymmetry survives the refit
  Eigen::MatrixXd s = fit.kernel.node_values() + fit.kernel.node_values().transpose();
  CHECK((s.array() - 1.0).abs().maxCoeff() < 1e-9);

  FitResult again = em_fit(w, opts);
  CHECK((again.kernel.node_values() - fit.kernel.node_values()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(again.state.bound_trace == fit.state.bound_trace);
}

TEST_CASE("neural backend smoke run is deterministic") {
  auto w = matrix_from("A,B,4\nB,C,3\nC,D,5\nA,C,2\nB,D,1\nD,A,2\n");
  EMOptions opts;
  opts.backend = Backend::neural;
  opts.grid_order = 8;
  opts.max_iters = 2;
  opts.nn.hidden = {16, 16};
  opts.nn.sample_factor = 20;
  opts.nn.epochs = 3;
  opts.seed = 42;
  FitResult fit = em_fit(w, opts);
  Eigen::MatrixXd s = fit.kernel.node_values() + fit.kernel.node_values().transpose();
  CHECK((s.array() - 1.0).abs().maxCoeff() < 1e-9);

  FitResult again = em_fit(w, opts);
  CHECK((again.kernel.node_values() - fit.kernel.node_values()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("option validation") {
  auto w = matrix_from("A,B\n");
  EMOptions opts;
  opts.max_iters = 0;
  CHECK_THROWS_AS(em_fit(w, opts), Error);
  opts = {};
  opts.kernel_tol = 0.0;
  CHECK_THROWS_AS(em_fit(w, opts), Error);
  CHECK_THROWS_AS(em_fit(nullptr, EMOptions{}), Error);
}

TEST_SUITE_END();
