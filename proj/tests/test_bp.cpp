#include <doctest.h>

#include <cmath>
#include <memory>
#include <sstream>

#include "oracles.hpp"
#include "pairrank/bp.hpp"
#include "pairrank/error.hpp"
#include "pairrank/posterior.hpp"
#include "pairrank/rng.hpp"

using namespace pairrank;

namespace {

WinMatrix matrix_from(const std::string& text) {
  std::istringstream in(text);
  return load_matches(in, "inline");
}

double logistic5(double x, double y) { return 1.0 / (1.0 + std::exp(5.0 * (y - x))); }

}  // namespace

TEST_SUITE_BEGIN("bp");

TEST_CASE("two players, one match: both messages uniform") {
  auto grid = cheb::make_grid(32);
  Kernel k = Kernel::logistic(grid, 5.0);
  WinMatrix w = matrix_from("A,B\n");
  MessageSet msgs = run_bp(w, k, {});
  REQUIRE(msgs.to_a.size() == 1);
  CHECK(msgs.converged);
  CHECK((msgs.to_a[0].array() - 1.0).abs().maxCoeff() < 1e-9);
  CHECK((msgs.to_b[0].array() - 1.0).abs().maxCoeff() < 1e-9);
}

TEST_CASE("no-match player has a uniform marginal; empty graph converges") {
  auto grid = cheb::make_grid(16);
  Kernel k = Kernel::logistic(grid, 5.0);
  WinMatrix w = matrix_from("A,B\nC,D,0\n");  // C and D never actually play
  MessageSet msgs = run_bp(w, k, {});
  int c = w.index_of("C");
  Eigen::VectorXd mu = bp_marginal(msgs, w, k, c);
  CHECK((mu.array() - 1.0).abs().maxCoeff() < 1e-12);

  WinMatrix empty = matrix_from("");
  MessageSet m0 = run_bp(empty, k, {});
  CHECK(m0.converged);
  CHECK(m0.residual == 0.0);
}

TEST_CASE("messages and marginals stay normalized and non-negative") {
  auto grid = cheb::make_grid(32);
  Kernel k = Kernel::logistic(grid, 5.0);
  WinMatrix w = matrix_from("A,B,3\nB,C,2\nC,A,1\nA,D,4\nD,B\n");  // loopy
  MessageSet msgs = run_bp(w, k, {});
  for (size_t e = 0; e < msgs.to_a.size(); ++e) {
    CHECK(msgs.to_a[e].minCoeff() >= 0.0);
    CHECK(msgs.to_b[e].minCoeff() >= 0.0);
    CHECK(grid->integrate(msgs.to_a[e]) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(grid->integrate(msgs.to_b[e]) == doctest::Approx(1.0).epsilon(1e-8));
  }
  for (int i = 0; i < w.num_players(); ++i) {
    Eigen::VectorXd mu = bp_marginal(msgs, w, k, i);
    CHECK(mu.minCoeff() >= 0.0);
    CHECK(grid->integrate(mu) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("3-player path: message equals direct quadrature of the exact conditional") {
  auto grid = cheb::make_grid(32);
  Kernel k = Kernel::logistic(grid, 5.0);
  // A-B (A beat B twice), B-C (C beat B once); path graph
  WinMatrix w = matrix_from("A,B,2\nC,B,1\n");
  MessageSet msgs = run_bp(w, k, {});
  REQUIRE(msgs.converged);

  int a = w.index_of("A"), b = w.index_of("B"), c = w.index_of("C");

  // mu_{A<-B}(x_B) ~ integral mu_{B<-C}(y) * b(x_B,y)^w_BC b(y,x_B)^w_CB dy
  // with mu_{B<-C} uniform; w_BC = 0, w_CB = 1, so it is integral b(y,x_B) dy
  const auto& xs = grid->nodes();
  const auto& wq = grid->quad_weights();
  Eigen::VectorXd expected(grid->order());
  for (int u = 0; u < grid->order(); ++u) {
    double acc = 0.0;
    for (int v = 0; v < grid->order(); ++v) acc += wq[v] * logistic5(xs[v], xs[u]);
    expected[u] = acc;
  }
  expected /= wq.dot(expected);

  // locate the A-B edge and its message to A
  for (size_t e = 0; e < w.edges().size(); ++e) {
    const Edge& edge = w.edges()[e];
    if ((edge.a == std::min(a, b)) && (edge.b == std::max(a, b))) {
      const Eigen::VectorXd& msg = (a == edge.a) ? msgs.to_a[e] : msgs.to_b[e];
      CHECK((msg - expected).cwiseAbs().maxCoeff() < 1e-6);
    }
  }

  // B's marginal mean agrees with the dense tensor oracle
  std::vector<oracle::WeightedEdge> edges = {{a, b, 2, 0}, {c, b, 1, 0}};
  Eigen::VectorXd means = oracle::brute_posterior_means(3, edges, logistic5);
  Eigen::VectorXd mu_b = bp_marginal(msgs, w, k, b);
  CHECK(grid->moment_weights().dot(mu_b) == doctest::Approx(means[b]).epsilon(1e-5));
}

TEST_CASE("2-player system: winner's marginal mean matches the 2d quadrature oracle") {
  auto grid = cheb::make_grid(32);
  Kernel k = Kernel::logistic(grid, 5.0);
  WinMatrix w = matrix_from("A,B\n");
  MessageSet msgs = run_bp(w, k, {});
  auto post = Posterior::compute(std::make_shared<WinMatrix>(w), k, msgs);

  // mean of winner = integral x b(x,y) dx dy / integral b(x,y) dx dy
  oracle::Quad q = oracle::gauss_legendre_01(64);
  double num = 0.0, den = 0.0;
  for (int u = 0; u < 64; ++u)
    for (int v = 0; v < 64; ++v) {
      double p = q.w[u] * q.w[v] * logistic5(q.x[u], q.x[v]);
      num += q.x[u] * p;
      den += p;
    }
  int a = w.index_of("A");
  double bp_mean = grid->moment_weights().dot(post.marginal(a));
  CHECK(bp_mean == doctest::Approx(num / den).epsilon(1e-6));
}

TEST_CASE("tree marginals match the brute-force oracle within 1e-4") {
  auto grid = cheb::make_grid(32);
  Kernel k = Kernel::logistic(grid, 5.0);
  Rng rng(101);
  for (int n = 2; n <= 4; ++n) {
    auto trees = oracle::labeled_trees(n);
    // sample a few trees per size to keep the unit suite fast (the
    // acceptance suite sweeps all of them)
    size_t step = trees.size() > 4 ? trees.size() / 4 : 1;
    for (size_t t = 0; t < trees.size(); t += step) {
      std::vector<MatchRecord> recs;
      std::vector<oracle::WeightedEdge> oedges;
      for (auto [i, j] : trees[t]) {
        int64_t wij = int64_t(rng.next_below(6));
        int64_t wji = int64_t(rng.next_below(6));
        if (wij + wji == 0) wij = 1;
        std::string pi = "P" + std::to_string(i), pj = "P" + std::to_string(j);
        if (wij > 0) recs.push_back({pi, pj, wij});
        if (wji > 0) recs.push_back({pj, pi, wji});
        oedges.push_back({i, j, wij, wji});
      }
      WinMatrix w = WinMatrix::from_records(recs);
      REQUIRE(w.num_players() == n);  // P0..Pn-1 sort to indices 0..n-1
      MessageSet msgs = run_bp(w, k, {});
      CHECK(msgs.converged);
      Eigen::VectorXd means = oracle::brute_posterior_means(n, oedges, logistic5);
      for (int i = 0; i < n; ++i) {
        double m = grid->moment_weights().dot(bp_marginal(msgs, w, k, i));
        CHECK(std::abs(m - means[i]) < 1e-4);
      }
    }
  }
}

TEST_CASE("joint marginal: single match is the rescaled kernel") {
  auto grid = cheb::make_grid(32);
  Kernel k = Kernel::logistic(grid, 5.0);
  WinMatrix w = matrix_from("A,B\n");
  MessageSet msgs = run_bp(w, k, {});
  int a = w.index_of("A"), b = w.index_of("B");
  Eigen::MatrixXd joint = bp_joint_marginal(msgs, w, k, a, b);
  // normalizer is integral b = 1/2 by antisymmetry, so joint = 2 b
  CHECK((joint - 2.0 * k.node_values()).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(grid->integrate2d(joint) == doctest::Approx(1.0).epsilon(1e-10));

  // transposed query
  Eigen::MatrixXd joint_ba = bp_joint_marginal(msgs, w, k, b, a);
  CHECK((joint_ba - joint.transpose()).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(bp_joint_marginal(msgs, w, k, a, a), Error);
}

TEST_CASE("joint marginal marginalizes back to the single-player marginal") {
  auto grid = cheb::make_grid(32);
  Kernel k = Kernel::logistic(grid, 5.0);
  WinMatrix w = matrix_from("A,B,2\nB,C\nC,D,3\nD,B\n");  // tree
  MessageSet msgs = run_bp(w, k, {});
  REQUIRE(msgs.converged);
  int b = w.index_of("B"), c = w.index_of("C");
  Eigen::MatrixXd joint = bp_joint_marginal(msgs, w, k, b, c);
  Eigen::VectorXd lumped = joint * grid->quad_weights();  // integrate over x_c
  Eigen::VectorXd direct = bp_marginal(msgs, w, k, b);
  CHECK((lumped - direct).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("symmetric record gives a symmetric joint") {
  auto grid = cheb::make_grid(16);
  Kernel k = Kernel::logistic(grid, 5.0);
  WinMatrix w = matrix_from("A,B,3\nB,A,3\n");
  MessageSet msgs = run_bp(w, k, {});
  Eigen::MatrixXd joint = bp_joint_marginal(msgs, w, k, w.index_of("A"), w.index_of("B"));
  CHECK((joint - joint.transpose()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("unobserved pair has no joint") {
  auto grid = cheb::make_grid(8);
  Kernel k = Kernel::logistic(grid, 5.0);
  WinMatrix w = matrix_from("A,B\nC,B\n");
  MessageSet msgs = run_bp(w, k, {});
  CHECK_THROWS_AS(bp_joint_marginal(msgs, w, k, w.index_of("A"), w.index_of("C")), Error);
}

TEST_CASE("relabeling players permutes the outputs") {
  auto grid = cheb::make_grid(24);
  Kernel k = Kernel::logistic(grid, 5.0);
  WinMatrix w1 = matrix_from("A,B,2\nB,C\nA,C,3\n");
  WinMatrix w2 = matrix_from("Z,Y,2\nY,X\nZ,X,3\n");  // same structure, reversed label order
  MessageSet m1 = run_bp(w1, k, {});
  MessageSet m2 = run_bp(w2, k, {});
  std::vector<std::pair<std::string, std::string>> pairs = {{"A", "Z"}, {"B", "Y"}, {"C", "X"}};
  for (auto& [l1, l2] : pairs) {
    Eigen::VectorXd mu1 = bp_marginal(m1, w1, k, w1.index_of(l1));
    Eigen::VectorXd mu2 = bp_marginal(m2, w2, k, w2.index_of(l2));
    CHECK((mu1 - mu2).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("fixed point on trees is schedule/initialization independent") {
  auto grid = cheb::make_grid(32);
  Kernel k = Kernel::logistic(grid, 5.0);
  WinMatrix w = matrix_from("A,B,2\nB,C\nB,D,4\n");
  BPOptions opts;
  opts.tol = 1e-12;
  MessageSet ref = run_bp(w, k, opts);

  // random starting messages must land on the same fixed point
  Rng rng(77);
  MessageSet warm;
  warm.to_a.resize(w.edges().size());
  warm.to_b.resize(w.edges().size());
  for (size_t e = 0; e < w.edges().size(); ++e) {
    Eigen::VectorXd ra(grid->order()), rb(grid->order());
    for (int i = 0; i < grid->order(); ++i) {
      ra[i] = 0.1 + rng.next_double();
      rb[i] = 0.1 + rng.next_double();
    }
    warm.to_a[e] = ra / grid->integrate(ra);
    warm.to_b[e] = rb / grid->integrate(rb);
  }
  MessageSet alt = run_bp(w, k, opts, &warm);
  for (size_t e = 0; e < w.edges().size(); ++e) {
    CHECK((alt.to_a[e] - ref.to_a[e]).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((alt.to_b[e] - ref.to_b[e]).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("option validation") {
  auto grid = cheb::make_grid(8);
  Kernel k = Kernel::logistic(grid, 5.0);
  WinMatrix w = matrix_from("A,B\n");
  BPOptions bad;
  bad.tol = 0.0;
  CHECK_THROWS_AS(run_bp(w, k, bad), Error);
  bad = {};
  bad.damping = 1.0;
  CHECK_THROWS_AS(run_bp(w, k, bad), Error);
  bad = {};
  bad.max_sweeps = 0;
  CHECK_THROWS_AS(run_bp(w, k, bad), Error);
}

TEST_SUITE_END();
