#include "pairrank/predict.hpp"

#include <algorithm>
#include <cmath>

#include "pairrank/error.hpp"

namespace pairrank {

namespace {

Eigen::VectorXd marginal_or_prior(const Posterior& post, int player) {
  if (player < 0) return Eigen::VectorXd::Ones(post.grid().order());
  if (player >= post.matches().num_players())
    fail(ErrorCode::invalid_argument, "player index out of range");
  return post.marginal(player);
}

}  // namespace

double percentile(const Posterior& posterior, int player) {
  Eigen::VectorXd mu = marginal_or_prior(posterior, player);
  double mean = posterior.grid().moment_weights().dot(mu);
  return std::clamp(100.0 * mean, 0.0, 100.0);
}

double win_probability(const Posterior& posterior, int i, int j, bool use_joint) {
  const auto& grid = posterior.grid();
  const Eigen::MatrixXd& b = posterior.kernel().node_values();
  if (i == j && i >= 0)
    fail(ErrorCode::invalid_argument, "win probability needs two distinct players");
  if (use_joint && i >= 0 && j >= 0 && posterior.pair_observed(i, j)) {
    Eigen::MatrixXd joint = posterior.joint(i, j);
    return grid.integrate2d(joint.cwiseProduct(b));
  }
  Eigen::VectorXd wi = grid.quad_weights().cwiseProduct(marginal_or_prior(posterior, i));
  Eigen::VectorXd wj = grid.quad_weights().cwiseProduct(marginal_or_prior(posterior, j));
  return wi.dot(b * wj);
}

std::vector<RankingRow> ranking_table(const Posterior& posterior) {
  const auto& w = posterior.matches();
  const auto& grid = posterior.grid();
  std::vector<RankingRow> rows;
  rows.reserve(size_t(w.num_players()));
  for (int i = 0; i < w.num_players(); ++i) {
    const Eigen::VectorXd& mu = posterior.marginal(i);
    double mean = grid.moment_weights().dot(mu);
    double m2 = grid.quad_weights().dot(
        (grid.nodes().array().square() * mu.array()).matrix());
    RankingRow row;
    row.id = w.label(i);
    row.post_mean = mean;
    row.percentile = std::clamp(100.0 * mean, 0.0, 100.0);
    row.post_sd = std::sqrt(std::max(0.0, m2 - mean * mean));
    row.matches = w.matches_of(i);
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(), [](const RankingRow& a, const RankingRow& b) {
    if (a.percentile != b.percentile) return a.percentile > b.percentile;
    return a.id < b.id;
  });
  return rows;
}

}  // namespace pairrank
