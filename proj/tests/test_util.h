#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "matchband/market.h"

namespace matchband::testing {

// Random market with distinct means per agent and random arm preferences.
inline MarketInstance RandomMarket(std::mt19937_64& gen, int n, int k, double noise = 1.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> mu(n, std::vector<double>(k));
  for (auto& row : mu) {
    for (;;) {
      for (double& v : row) v = u(gen);
      std::vector<double> s = row;
      std::sort(s.begin(), s.end());
      if (std::adjacent_find(s.begin(), s.end()) == s.end()) break;
    }
  }
  std::vector<std::vector<int>> prefs(k, std::vector<int>(n));
  for (auto& p : prefs) {
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), gen);
  }
  return MarketInstance(mu, prefs, noise);
}

inline std::vector<int> Identity(int n) {
  std::vector<int> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace matchband::testing
