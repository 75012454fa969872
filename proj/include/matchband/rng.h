#pragma once

#include <cstdint>
#include <random>

namespace matchband {

// SplitMix64 finalizer; used only to derive well-separated stream seeds.
constexpr std::uint64_t MixSeed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// What a stream is used for. Each (trial seed, agent, purpose) triple owns an
// independent generator, so reordering agent loops or running trials on other
// threads never changes the numbers any single agent sees.
enum class StreamPurpose : std::uint64_t {
  kReward = 0,
  kDecision = 1,
  kMarket = 2,
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng ForStream(std::uint64_t trial_seed, std::uint64_t index,
                       StreamPurpose purpose) {
    const std::uint64_t key =
        MixSeed(MixSeed(trial_seed) ^ MixSeed(index * 4 + static_cast<std::uint64_t>(purpose)));
    return Rng(key);
  }

  double Normal() { return normal_(engine_); }
  double Uniform() { return uniform_(engine_); }

  // Uniform integer in [0, bound).
  int UniformInt(int bound) {
    return std::uniform_int_distribution<int>(0, bound - 1)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// Per-trial seed for the fan-out: base seed xor trial index.
constexpr std::uint64_t TrialSeed(std::uint64_t base_seed, std::uint64_t trial) {
  return base_seed ^ trial;
}

}  // namespace matchband
