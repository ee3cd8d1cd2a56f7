#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace relulab {

// Philox4x32-10 counter-based generator.
//
// Every draw is a pure function of (seed, substream, counter), so datasets
// regenerate bit-identically regardless of thread count or evaluation order,
// and independent substreams (lift draws, label noise, restarts, ...) never
// perturb each other.
class CounterRng {
 public:
  CounterRng() = default;
  CounterRng(std::uint64_t seed, std::uint64_t substream = 0)
      : key_(derive_key(seed, substream)), seed_(seed) {}

  // A sibling generator on a different substream of the same seed.
  CounterRng substream(std::uint64_t substream) const {
    return CounterRng(seed_, substream);
  }

  std::uint64_t seed() const { return seed_; }

  // Raw 4x32-bit Philox block at a 128-bit counter.
  std::array<std::uint32_t, 4> block(std::uint64_t ctr_hi,
                                     std::uint64_t ctr_lo) const {
    std::uint32_t c0 = static_cast<std::uint32_t>(ctr_lo);
    std::uint32_t c1 = static_cast<std::uint32_t>(ctr_lo >> 32);
    std::uint32_t c2 = static_cast<std::uint32_t>(ctr_hi);
    std::uint32_t c3 = static_cast<std::uint32_t>(ctr_hi >> 32);
    std::uint32_t k0 = static_cast<std::uint32_t>(key_);
    std::uint32_t k1 = static_cast<std::uint32_t>(key_ >> 32);
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c0;
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c2;
      const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
      const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
      c0 = hi1 ^ c1 ^ k0;
      c1 = lo1;
      c2 = hi0 ^ c3 ^ k1;
      c3 = lo0;
      k0 += kWeyl0;
      k1 += kWeyl1;
    }
    return {c0, c1, c2, c3};
  }

  // Uniform in the open interval (0, 1); one Philox block yields two.
  double uniform01(std::uint64_t idx) const {
    const auto b = block(0, idx);
    return to_unit(b[0], b[1]);
  }

  // Standard normal via Box-Muller; one block per draw.
  double gaussian(std::uint64_t idx) const {
    const auto b = block(0, idx);
    const double u1 = to_unit(b[0], b[1]);
    const double u2 = to_unit(b[2], b[3]);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Standard normal truncated to the non-negative reals.
  double half_normal(std::uint64_t idx) const {
    return std::abs(gaussian(idx));
  }

  // Uniform on {-1, +1}.
  double rademacher(std::uint64_t idx) const {
    return (block(0, idx)[0] & 1u) ? 1.0 : -1.0;
  }

  bool bernoulli(std::uint64_t idx, double p) const {
    return uniform01(idx) < p;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  }

  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t sub) {
    return splitmix64(seed ^ splitmix64(sub + 0x51A2B3C4D5E6F708ull));
  }

  // 53 random bits centered in (0,1); never returns 0 or 1.
  static double to_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits =
        (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
    return (static_cast<double>(bits & ((1ull << 53) - 1)) + 0.5) *
           0x1.0p-53;
  }

  std::uint64_t key_ = 0;
  std::uint64_t seed_ = 0;
};

// Substream identifiers, one per purpose.
namespace stream {
inline constexpr std::uint64_t kCube = 1;        // hypercube points
inline constexpr std::uint64_t kLabelNoise = 2;  // parity label flips
inline constexpr std::uint64_t kLift = 3;        // half-normal lift draws
inline constexpr std::uint64_t kGaussian = 4;    // Gaussian marginals
inline constexpr std::uint64_t kCorruption = 5;  // adversarial corruption
inline constexpr std::uint64_t kRestart = 6;     // learner restarts
inline constexpr std::uint64_t kSplit = 7;       // train/holdout splits
inline constexpr std::uint64_t kOracle = 8;      // SQ oracle sampling
inline constexpr std::uint64_t kMc = 9;          // Monte Carlo estimates
}  // namespace stream

}  // namespace relulab
