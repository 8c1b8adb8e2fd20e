#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace marcuslab {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
///
/// The 64-bit seed is the key. The 128-bit counter is split into a 64-bit
/// block index (low words) and a 64-bit stream index (high words), so
/// replica r of a run with seed s is `Philox(s, r)` and never overlaps with
/// any other replica regardless of execution order.
class Philox {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox(std::uint64_t seed = 0, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform double in the open interval (0, 1), 53 random bits.
  double uniform();

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard exponential variate.
  double exponential();

  /// Standard normal variate (Box-Muller, no caching so the stream stays counter-aligned).
  double normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Raw ten-round bijection, exposed for known-answer tests.
  static Block bijection(Block counter, Key key);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Block buffer_{};
  int used_ = 4;
};

/// Stream index for a named sub-purpose of a replica, e.g. calibration vs. sampling.
constexpr std::uint64_t substream(std::uint64_t replica, std::uint64_t purpose) {
  return (purpose << 48) ^ replica;
}

}  // namespace marcuslab
