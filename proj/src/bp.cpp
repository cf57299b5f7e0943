#include "pairrank/bp.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <utility>

#include "pairrank/error.hpp"

namespace pairrank {

namespace {

// floor before taking logs of contracted messages; keeps sums finite
constexpr double kTiny = 1e-300;

// Contraction matrices for one (wins_ab, wins_ba) exponent pair.
// G(u,v) = b(x_u, x_v)^wab * b(x_v, x_u)^wba with u indexing a's skill.
// to_a_op = G * diag(quad_w)   (applied to mu_{a<-b}, yields m_{b->a})
// to_b_op = G^T * diag(quad_w) (applied to mu_{b<-a}, yields m_{a->b})
struct EdgeFactor {
  Eigen::MatrixXd to_a_op;
  Eigen::MatrixXd to_b_op;
};

class FactorCache {
 public:
  FactorCache(const Kernel& kernel) : kernel_(kernel) {}

  const EdgeFactor& get(const Edge& e) {
    auto key = std::make_pair(e.wins_ab, e.wins_ba);
    auto it = cache_.find(key);
    if (it != cache_.end()) return *it->second;
    const Eigen::MatrixXd& lb = kernel_.log_node_values();
    Eigen::MatrixXd logG =
        double(e.wins_ab) * lb + double(e.wins_ba) * lb.transpose();
    Eigen::MatrixXd G = logG.array().exp().matrix();
    auto f = std::make_shared<EdgeFactor>();
    f->to_a_op = G * kernel_.grid().quad_weights().asDiagonal();
    f->to_b_op = G.transpose() * kernel_.grid().quad_weights().asDiagonal();
    auto [pos, inserted] = cache_.emplace(key, std::move(f));
    return *pos->second;
  }

 private:
  const Kernel& kernel_;
  std::map<std::pair<int64_t, int64_t>, std::shared_ptr<EdgeFactor>> cache_;
};

Eigen::VectorXd floored_log(const Eigen::VectorXd& v) {
  return v.cwiseMax(kTiny).array().log().matrix();
}

// exp-normalize a log-density and scale to unit quadrature mass
Eigen::VectorXd log_to_density(const Eigen::VectorXd& logv, const Eigen::VectorXd& quad_w) {
  Eigen::VectorXd mu = (logv.array() - logv.maxCoeff()).exp().matrix();
  mu = mu.cwiseMax(0.0);
  double z = quad_w.dot(mu);
  if (!(z > 0.0) || !std::isfinite(z))
    fail(ErrorCode::numeric, "belief propagation produced a degenerate density");
  return mu / z;
}

void check_options(const BPOptions& opts) {
  if (!(opts.tol > 0.0)) fail(ErrorCode::invalid_argument, "bp tol must be > 0");
  if (opts.max_sweeps < 1) fail(ErrorCode::invalid_argument, "bp max_sweeps must be >= 1");
  if (!(opts.damping >= 0.0 && opts.damping < 1.0))
    fail(ErrorCode::invalid_argument, "bp damping must be in [0,1)");
}

}  // namespace

MessageSet run_bp(const WinMatrix& w, const Kernel& kernel, const BPOptions& opts,
                  const MessageSet* warm) {
  check_options(opts);
  const int L = kernel.grid().order();
  const Eigen::VectorXd& quad_w = kernel.grid().quad_weights();
  const size_t n_edges = w.edges().size();

  MessageSet cur;
  bool warm_ok = warm != nullptr && warm->to_a.size() == n_edges &&
                 warm->to_b.size() == n_edges &&
                 (n_edges == 0 || warm->to_a[0].size() == L);
  if (warm_ok) {
    cur = *warm;
  } else {
    cur.to_a.assign(n_edges, Eigen::VectorXd::Ones(L));
    cur.to_b.assign(n_edges, Eigen::VectorXd::Ones(L));
  }
  cur.sweeps = 0;
  cur.converged = n_edges == 0;
  cur.residual = n_edges == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  if (n_edges == 0) return cur;

  FactorCache factors(kernel);
  MessageSet next = cur;

  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    double residual = 0.0;
    for (int j = 0; j < w.num_players(); ++j) {
      const auto& adj = w.incident_edges(j);
      if (adj.empty()) continue;
      const int deg = int(adj.size());

      // log of each neighbor's contracted contribution m_{k->j}
      Eigen::MatrixXd lm(deg, L);
      Eigen::VectorXd total = Eigen::VectorXd::Zero(L);
      for (int t = 0; t < deg; ++t) {
        const Edge& e = w.edges()[size_t(adj[size_t(t)])];
        const EdgeFactor& f = factors.get(e);
        const bool j_is_a = (e.a == j);
        const Eigen::VectorXd& incoming =
            j_is_a ? cur.to_a[size_t(adj[size_t(t)])] : cur.to_b[size_t(adj[size_t(t)])];
        Eigen::VectorXd m = j_is_a ? (f.to_a_op * incoming) : (f.to_b_op * incoming);
        lm.row(t) = floored_log(m);
        total += lm.row(t).transpose();
      }

      // outgoing message on each edge excludes that edge's own contribution
      for (int t = 0; t < deg; ++t) {
        const int e_idx = adj[size_t(t)];
        const Edge& e = w.edges()[size_t(e_idx)];
        const bool j_is_a = (e.a == j);
        Eigen::VectorXd mu = log_to_density(total - lm.row(t).transpose(), quad_w);
        const Eigen::VectorXd& old = j_is_a ? cur.to_b[size_t(e_idx)] : cur.to_a[size_t(e_idx)];
        Eigen::VectorXd merged = (1.0 - opts.damping) * mu + opts.damping * old;
        residual = std::max(residual, (merged - old).cwiseAbs().maxCoeff());
        (j_is_a ? next.to_b[size_t(e_idx)] : next.to_a[size_t(e_idx)]) = std::move(merged);
      }
    }
    if (!std::isfinite(residual))
      fail(ErrorCode::numeric,
           "belief propagation diverged (non-finite residual); consider a larger "
           "probability floor");
    std::swap(cur.to_a, next.to_a);
    std::swap(cur.to_b, next.to_b);
    cur.sweeps = sweep;
    cur.residual = residual;
    if (residual <= opts.tol) {
      cur.converged = true;
      break;
    }
  }
  return cur;
}

Eigen::VectorXd bp_marginal(const MessageSet& msgs, const WinMatrix& w,
                            const Kernel& kernel, int player) {
  const int L = kernel.grid().order();
  if (player < 0 || player >= w.num_players())
    fail(ErrorCode::invalid_argument, "player index out of range");
  const auto& adj = w.incident_edges(player);
  if (adj.empty()) return Eigen::VectorXd::Ones(L);  // uniform prior

  FactorCache factors(kernel);
  Eigen::VectorXd total = Eigen::VectorXd::Zero(L);
  for (int e_idx : adj) {
    const Edge& e = w.edges()[size_t(e_idx)];
    const EdgeFactor& f = factors.get(e);
    const bool is_a = (e.a == player);
    const Eigen::VectorXd& incoming = is_a ? msgs.to_a[size_t(e_idx)] : msgs.to_b[size_t(e_idx)];
    Eigen::VectorXd m = is_a ? (f.to_a_op * incoming) : (f.to_b_op * incoming);
    total += floored_log(m);
  }
  return log_to_density(total, kernel.grid().quad_weights());
}

Eigen::MatrixXd bp_joint_marginal(const MessageSet& msgs, const WinMatrix& w,
                                  const Kernel& kernel, int i, int j) {
  if (i == j) fail(ErrorCode::invalid_argument, "joint marginal needs two distinct players");
  const int a = std::min(i, j), b = std::max(i, j);
  const Edge* edge = nullptr;
  size_t e_idx = 0;
  for (int idx : w.incident_edges(a)) {
    const Edge& e = w.edges()[size_t(idx)];
    if (e.a == a && e.b == b) {
      edge = &e;
      e_idx = size_t(idx);
      break;
    }
  }
  if (edge == nullptr)
    fail(ErrorCode::not_found, "players '" + w.label(i) + "' and '" + w.label(j) +
                                   "' never played; joint marginal undefined");

  const Eigen::MatrixXd& lb = kernel.log_node_values();
  // log mu_ab(u,v) = log mu_{b<-a}(u) + log mu_{a<-b}(v)
  //                + wab log b(u,v) + wba log b(v,u)
  Eigen::MatrixXd logm = double(edge->wins_ab) * lb + double(edge->wins_ba) * lb.transpose();
  logm.colwise() += floored_log(msgs.to_b[e_idx]);
  logm.rowwise() += floored_log(msgs.to_a[e_idx]).transpose();

  Eigen::MatrixXd m = (logm.array() - logm.maxCoeff()).exp().matrix();
  double z = kernel.grid().integrate2d(m);
  if (!(z > 0.0) || !std::isfinite(z))
    fail(ErrorCode::numeric, "degenerate joint marginal");
  m /= z;
  if (i == a) return m;
  return m.transpose();
}

}  // namespace pairrank
