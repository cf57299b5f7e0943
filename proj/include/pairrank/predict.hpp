#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pairrank/posterior.hpp"

namespace pairrank {

// Posterior mean skill scaled to [0,100]. player = -1 (unknown) uses the
// uniform prior and gives exactly 50.
double percentile(const Posterior& posterior, int player);

// Expected win probability of i over j under the pair's posterior.
// Observed pairs use the joint belief when use_joint is set; everything
// else (including unknown players, index -1) falls back to the product of
// marginals, with the uniform prior for unknowns.
double win_probability(const Posterior& posterior, int i, int j, bool use_joint = true);

struct RankingRow {
  std::string id;
  double percentile = 0.0;
  double post_mean = 0.0;
  double post_sd = 0.0;
  int64_t matches = 0;
};

// Rows sorted by percentile descending, ties broken by id.
std::vector<RankingRow> ranking_table(const Posterior& posterior);

}  // namespace pairrank
