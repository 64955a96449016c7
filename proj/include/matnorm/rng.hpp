#pragma once

// Reproducible random streams.
//
// Every replicate (or importance sample) k of a run with seed S draws from its
// own generator Stream(S, k, lane). The generator is xoshiro256** whose
// 256-bit state is filled by SplitMix64 starting from a key that mixes
// (seed, index, lane). Because a stream depends only on its key, results do
// not depend on how indices are scheduled across threads.
//
// Normals use the Box-Muller transform on 53-bit uniforms in (0, 1); both
// outputs of a transform are used, first the cosine branch then the sine one.

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace matnorm {

namespace lanes {
inline constexpr std::uint64_t kRisk = 0;
inline constexpr std::uint64_t kImportance = 1;
inline constexpr std::uint64_t kPrediction = 2;
inline constexpr std::uint64_t kScan = 3;
inline constexpr std::uint64_t kFuzz = 4;
inline constexpr std::uint64_t kDerivedSeed = 5;
}  // namespace lanes

constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t mix_key(std::uint64_t seed, std::uint64_t index, std::uint64_t lane) noexcept {
  std::uint64_t s = seed;
  std::uint64_t key = splitmix64(s);
  s = key ^ index;
  key = splitmix64(s);
  s = key ^ (lane * 0xD1B54A32D192ED03ULL);
  return splitmix64(s);
}

/// Seed for a nested stream family (e.g. the importance samples used inside
/// replicate `index`).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix_key(seed, index, lanes::kDerivedSeed);
}

class Stream {
 public:
  using result_type = std::uint64_t;

  Stream(std::uint64_t seed, std::uint64_t index, std::uint64_t lane = 0) noexcept {
    std::uint64_t s = mix_key(seed, index, lane);
    for (auto& word : state_) word = splitmix64(s);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Fills in column-major order.
  template <class Derived>
  void fill_normal(Eigen::DenseBase<Derived>& out) noexcept {
    for (Eigen::Index j = 0; j < out.cols(); ++j)
      for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, j) = normal();
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4]{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace matnorm
