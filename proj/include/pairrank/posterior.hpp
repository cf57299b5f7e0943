#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "pairrank/bp.hpp"
#include "pairrank/kernel.hpp"
#include "pairrank/win_matrix.hpp"

namespace pairrank {

// Approximate skill posterior: per-player marginal densities plus the
// message set needed to form pairwise joints on demand. Immutable.
class Posterior {
 public:
  static Posterior compute(std::shared_ptr<const WinMatrix> w, Kernel kernel,
                           MessageSet msgs);

  const WinMatrix& matches() const { return *matches_; }
  const Kernel& kernel() const { return kernel_; }
  const cheb::ChebGrid& grid() const { return kernel_.grid(); }
  const MessageSet& messages() const { return msgs_; }

  // node values, unit mass; uniform for matchless players
  const Eigen::VectorXd& marginal(int player) const { return marginals_[size_t(player)]; }

  bool pair_observed(int i, int j) const;
  // joint density over (x_i, x_j); requires pair_observed
  Eigen::MatrixXd joint(int i, int j) const {
    return bp_joint_marginal(msgs_, *matches_, kernel_, i, j);
  }

 private:
  Posterior(std::shared_ptr<const WinMatrix> w, Kernel kernel, MessageSet msgs,
            std::vector<Eigen::VectorXd> marginals)
      : matches_(std::move(w)),
        kernel_(std::move(kernel)),
        msgs_(std::move(msgs)),
        marginals_(std::move(marginals)) {}

  std::shared_ptr<const WinMatrix> matches_;
  Kernel kernel_;
  MessageSet msgs_;
  std::vector<Eigen::VectorXd> marginals_;
};

}  // namespace pairrank
