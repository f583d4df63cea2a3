#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace cordet {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The 128-bit counter is split into a 64-bit stream id (high half) and a
/// 64-bit block index (low half); the 64-bit key is the master seed. Every
/// (seed, stream) pair therefore owns a disjoint slice of the counter space,
/// and a stream can be re-created anywhere without sharing state.
class Philox4x32 {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    if (lane_ == 2) {
      refill();
    }
    const std::uint64_t lo = buffer_[2 * lane_];
    const std::uint64_t hi = buffer_[2 * lane_ + 1];
    ++lane_;
    return (hi << 32) | lo;
  }

  /// Skips `blocks` 128-bit output blocks.
  void discard_blocks(std::uint64_t blocks) noexcept {
    block_ += blocks;
    lane_ = 2;
  }

  /// Raw ten-round bijection; exposed for known-answer tests.
  static constexpr Block encrypt(Block ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      ctr = Block{static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
                  static_cast<std::uint32_t>(p1),
                  static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
                  static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  void refill() noexcept {
    const Block ctr{static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                    static_cast<std::uint32_t>(stream_),
                    static_cast<std::uint32_t>(stream_ >> 32)};
    buffer_ = encrypt(ctr, key_);
    ++block_;
    lane_ = 0;
  }

  Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Block buffer_{};
  unsigned lane_ = 2;
};

/// SplitMix64 finalizer; used to hash structured indices into stream ids.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Identifies one reproducible random stream.
struct RngStream {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  /// Child stream for sub-task `index` (trial, chunk, hypothesis...).
  [[nodiscard]] constexpr RngStream child(std::uint64_t index) const noexcept {
    return {master_seed, mix64(stream_id ^ mix64(index + 0x632BE59BD9B4E019ull))};
  }

  [[nodiscard]] Philox4x32 engine() const noexcept { return {master_seed, stream_id}; }

  friend constexpr bool operator==(const RngStream&, const RngStream&) = default;
};

}  // namespace cordet
