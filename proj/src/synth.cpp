#include "pairrank/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pairrank/error.hpp"
#include "pairrank/rng.hpp"

namespace pairrank {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

std::string player_label(int index, int width) {
  std::string digits = std::to_string(index);
  return "P" + std::string(size_t(std::max(0, width - int(digits.size()))), '0') + digits;
}

}  // namespace

GroundTruthKernel builtin_kernel(const std::string& name, double logistic_slope,
                                 double step_noise) {
  if (name == "logistic") {
    double s = logistic_slope;
    return {name, [s](double x, double y) { return sigmoid(s * (x - y)); }};
  }
  if (name == "step") {
    double eta = step_noise;
    return {name, [eta](double x, double y) {
              if (x > y) return 1.0 - eta;
              if (x < y) return eta;
              return 0.5;
            }};
  }
  if (name == "uniform") {
    return {name, [](double x, double y) { return 0.5 * (1.0 + (x - y)); }};
  }
  if (name == "complex") {
    return {name, [](double x, double y) {
              return sigmoid((2.0 + 10.0 * x * y) * (x - y));
            }};
  }
  fail(ErrorCode::invalid_argument,
       "unknown kernel '" + name + "' (expected logistic, step, uniform or complex)");
}

SynthResult generate(const SynthConfig& config) {
  const int n = config.n;
  const int k = config.k;
  if (n < 2) fail(ErrorCode::invalid_argument, "need at least 2 players");
  if (k < 1) fail(ErrorCode::invalid_argument, "need at least 1 match per player");
  if (!config.kernel.win_probability)
    fail(ErrorCode::invalid_argument, "no ground-truth kernel");
  const bool even_n = n % 2 == 0;
  if (!even_n && k % 2 != 0)
    fail(ErrorCode::invalid_argument,
         "impossible regular pairing: odd player count with odd matches per player");

  Rng rng(config.seed);
  const int width = int(std::to_string(n - 1).size());
  std::vector<double> skills(size_t(n));
  for (int i = 0; i < n; ++i) skills[size_t(i)] = rng.next_double();

  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(size_t(n) * size_t(k) / 2);
  std::vector<int> order(size_t(n));
  std::iota(order.begin(), order.end(), 0);
  auto shuffle = [&]() {
    for (size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[size_t(rng.next_below(uint64_t(i)))]);
  };
  if (even_n) {
    // k rounds of random perfect matchings
    for (int round = 0; round < k; ++round) {
      shuffle();
      for (int t = 0; t + 1 < n; t += 2)
        pairs.emplace_back(order[size_t(t)], order[size_t(t + 1)]);
    }
  } else {
    // k/2 random cycles; every player meets both cycle neighbors
    for (int round = 0; round < k / 2; ++round) {
      shuffle();
      for (int t = 0; t < n; ++t)
        pairs.emplace_back(order[size_t(t)], order[size_t((t + 1) % n)]);
    }
  }

  std::vector<MatchRecord> records;
  records.reserve(pairs.size());
  for (auto [i, j] : pairs) {
    double p = config.kernel.win_probability(skills[size_t(i)], skills[size_t(j)]);
    bool i_wins = rng.next_double() < p;
    records.push_back({player_label(i_wins ? i : j, width),
                       player_label(i_wins ? j : i, width), 1});
  }

  SynthResult result;
  result.matches = WinMatrix::from_records(records);
  // zero-padded labels sort numerically; every player plays k >= 1 matches,
  // so the matrix index space covers all n players
  result.skills.resize(size_t(result.matches.num_players()));
  for (int i = 0; i < n; ++i) {
    int idx = result.matches.index_of(player_label(i, width));
    if (idx >= 0) result.skills[size_t(idx)] = skills[size_t(i)];
  }
  return result;
}

}  // namespace pairrank
