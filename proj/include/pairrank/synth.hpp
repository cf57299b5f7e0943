#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pairrank/win_matrix.hpp"

namespace pairrank {

// Closed-form outcome kernel used to simulate tournaments.
struct GroundTruthKernel {
  std::string name;
  std::function<double(double, double)> win_probability;
};

// logistic: sigma(slope (x-y)); step: eta + (1-2 eta) [x > y] with ties at
// 1/2; uniform: (1 + (x-y))/2; complex: sigma((2 + 10 x y)(x-y)), a
// location-dependent slope that is not a function of x-y alone.
GroundTruthKernel builtin_kernel(const std::string& name, double logistic_slope = 5.0,
                                 double step_noise = 0.05);

struct SynthConfig {
  int n = 1024;         // players
  int k = 64;           // matches per player
  GroundTruthKernel kernel;
  uint64_t seed = 0;
};

struct SynthResult {
  WinMatrix matches;
  std::vector<double> skills;  // indexed like matches' players
};

// Uniform random skills and a k-regular random pairing; each match's winner
// is drawn from the kernel. Deterministic for a given seed.
SynthResult generate(const SynthConfig& config);

}  // namespace pairrank
