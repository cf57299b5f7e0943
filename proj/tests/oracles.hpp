// Test-only oracles: dense tensor-product quadrature of the exact skill
// posterior for tiny player sets, plus small combinatorial helpers. Kept
// deliberately independent of the library's grid/message machinery: the
// quadrature rule here is Gauss-Legendre, not the Chebyshev rule used by
// the implementation under test.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

struct Quad {
  Eigen::VectorXd x;  // nodes on [0,1]
  Eigen::VectorXd w;
};

// Gauss-Legendre rule mapped to [0,1], nodes by Newton iteration.
inline Quad gauss_legendre_01(int n) {
  Quad q;
  q.x.resize(n);
  q.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p0 = 0, p1 = 0, dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      p0 = 1.0;
      p1 = 0.0;
      for (int k = 0; k < n; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * t * p1 - k * p2) / (k + 1.0);
      }
      dp = n * (t * p0 - p1) / (t * t - 1.0);
      double dt = p0 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double wi = 2.0 / ((1.0 - t * t) * dp * dp);
    q.x[i] = 0.5 * (1.0 - t);
    q.x[n - 1 - i] = 0.5 * (1.0 + t);
    q.w[i] = 0.5 * wi;
    q.w[n - 1 - i] = 0.5 * wi;
  }
  return q;
}

struct WeightedEdge {
  int i = 0;
  int j = 0;
  int64_t w_ij = 0;  // times i beat j
  int64_t w_ji = 0;
};

using KernelFn = std::function<double(double, double)>;

// Exhaustively integrate the posterior \prod b(x_i,x_j)^{w_ij} over [0,1]^n
// and return each player's marginal mean. n is limited by memory/time only.
inline Eigen::VectorXd brute_posterior_means(int n_players,
                                             const std::vector<WeightedEdge>& edges,
                                             const KernelFn& b, int quad_points = 48) {
  Quad q = gauss_legendre_01(quad_points);
  const int m = quad_points;

  // per-edge factor tables on the quadrature grid
  std::vector<Eigen::MatrixXd> table(edges.size());
  for (size_t e = 0; e < edges.size(); ++e) {
    table[e].resize(m, m);
    for (int u = 0; u < m; ++u)
      for (int v = 0; v < m; ++v)
        table[e](u, v) = std::pow(b(q.x[u], q.x[v]), double(edges[e].w_ij)) *
                         std::pow(b(q.x[v], q.x[u]), double(edges[e].w_ji));
  }

  double z = 0.0;
  Eigen::VectorXd moment = Eigen::VectorXd::Zero(n_players);
  std::vector<int> idx(size_t(n_players), 0);
  while (true) {
    double p = 1.0;
    for (size_t e = 0; e < edges.size(); ++e)
      p *= table[e](idx[size_t(edges[e].i)], idx[size_t(edges[e].j)]);
    double wq = 1.0;
    for (int d = 0; d < n_players; ++d) wq *= q.w[idx[size_t(d)]];
    double pw = p * wq;
    z += pw;
    for (int d = 0; d < n_players; ++d) moment[d] += pw * q.x[idx[size_t(d)]];

    int d = 0;
    while (d < n_players && ++idx[size_t(d)] == m) {
      idx[size_t(d)] = 0;
      ++d;
    }
    if (d == n_players) break;
  }
  return moment / z;
}

// Marginal density of one player evaluated at the given points (each value
// is an (n-1)-dimensional integral), normalized to unit mass w.r.t. the
// true integral computed the same way.
inline Eigen::VectorXd brute_marginal_density(int n_players,
                                              const std::vector<WeightedEdge>& edges,
                                              const KernelFn& b, int player,
                                              const Eigen::VectorXd& at,
                                              int quad_points = 48) {
  Quad q = gauss_legendre_01(quad_points);
  const int m = quad_points;
  Eigen::VectorXd out(at.size());
  for (int pt = 0; pt < at.size(); ++pt) {
    std::vector<int> idx(size_t(n_players), 0);
    double acc = 0.0;
    while (true) {
      double p = 1.0;
      for (const auto& e : edges) {
        double xi = e.i == player ? at[pt] : q.x[idx[size_t(e.i)]];
        double xj = e.j == player ? at[pt] : q.x[idx[size_t(e.j)]];
        p *= std::pow(b(xi, xj), double(e.w_ij)) * std::pow(b(xj, xi), double(e.w_ji));
      }
      double wq = 1.0;
      for (int d = 0; d < n_players; ++d)
        if (d != player) wq *= q.w[idx[size_t(d)]];
      acc += p * wq;

      int d = 0;
      if (d == player) ++d;
      while (d < n_players && ++idx[size_t(d)] == m) {
        idx[size_t(d)] = 0;
        ++d;
        if (d == player) ++d;
      }
      if (d >= n_players) break;
    }
    out[pt] = acc;
  }
  // normalize against the full-posterior mass computed with the same rule
  std::vector<int> idx(size_t(n_players), 0);
  double z = 0.0;
  while (true) {
    double p = 1.0;
    for (const auto& e : edges)
      p *= std::pow(b(q.x[idx[size_t(e.i)]], q.x[idx[size_t(e.j)]]), double(e.w_ij)) *
           std::pow(b(q.x[idx[size_t(e.j)]], q.x[idx[size_t(e.i)]]), double(e.w_ji));
    double wq = 1.0;
    for (int d = 0; d < n_players; ++d) wq *= q.w[idx[size_t(d)]];
    z += p * wq;
    int d = 0;
    while (d < n_players && ++idx[size_t(d)] == m) {
      idx[size_t(d)] = 0;
      ++d;
    }
    if (d == n_players) break;
  }
  return out / z;
}

// All labeled trees on n vertices via Prufer sequences (n^(n-2) of them).
inline std::vector<std::vector<std::pair<int, int>>> labeled_trees(int n) {
  std::vector<std::vector<std::pair<int, int>>> trees;
  if (n == 1) return trees;
  if (n == 2) {
    trees.push_back({{0, 1}});
    return trees;
  }
  const int len = n - 2;
  std::vector<int> seq(size_t(len), 0);
  while (true) {
    // decode
    std::vector<int> degree(size_t(n), 1);
    for (int s : seq) degree[size_t(s)]++;
    std::vector<std::pair<int, int>> edges;
    std::vector<int> deg = degree;
    std::vector<bool> used(size_t(n), false);
    std::vector<int> work = seq;
    for (int s : work) {
      for (int leaf = 0; leaf < n; ++leaf) {
        if (deg[size_t(leaf)] == 1 && !used[size_t(leaf)]) {
          edges.push_back({leaf, s});
          used[size_t(leaf)] = true;
          deg[size_t(s)]--;
          break;
        }
      }
    }
    std::vector<int> rest;
    for (int v = 0; v < n; ++v)
      if (!used[size_t(v)] && deg[size_t(v)] == 1) rest.push_back(v);
    edges.push_back({rest[0], rest[1]});
    trees.push_back(edges);

    int d = len - 1;
    while (d >= 0 && ++seq[size_t(d)] == n) {
      seq[size_t(d)] = 0;
      --d;
    }
    if (d < 0) break;
  }
  return trees;
}

}  // namespace oracle
