#include "pairrank/posterior.hpp"

#include "pairrank/error.hpp"

namespace pairrank {

Posterior Posterior::compute(std::shared_ptr<const WinMatrix> w, Kernel kernel,
                             MessageSet msgs) {
  if (!w) fail(ErrorCode::invalid_argument, "null win matrix");
  if (msgs.to_a.size() != w->edges().size())
    fail(ErrorCode::invalid_argument, "message set does not match the win matrix");
  std::vector<Eigen::VectorXd> marginals;
  marginals.reserve(size_t(w->num_players()));
  for (int i = 0; i < w->num_players(); ++i)
    marginals.push_back(bp_marginal(msgs, *w, kernel, i));
  return Posterior(std::move(w), std::move(kernel), std::move(msgs), std::move(marginals));
}

bool Posterior::pair_observed(int i, int j) const {
  if (i == j || i < 0 || j < 0 || i >= matches_->num_players() || j >= matches_->num_players())
    return false;
  return matches_->wins(i, j) + matches_->wins(j, i) > 0;
}

}  // namespace pairrank
