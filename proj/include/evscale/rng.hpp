#pragma once

// Counter-based coin-toss randomness built on splitmix64
// (https://prng.di.unimi.it/splitmix64.c). Word j of trial i is a pure
// function of (seed, i, j), so batched and per-toss consumers see exactly
// the same toss sequence and results cannot depend on worker count.

#include <bit>
#include <cstdint>

namespace evscale {

inline constexpr std::uint64_t kSplitmixGamma = 0x9E3779B97F4A7C15ull;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

inline constexpr std::uint64_t trial_key(std::uint64_t seed,
                                         std::uint64_t trial) {
  return mix64(mix64(seed ^ 0x6A09E667F3BCC909ull) +
               (trial + 1) * 0xD1B54A32D192ED03ull);
}

// Stream of fair coin tosses for one trial. Toss t is bit (t mod 64) of
// word floor(t/64); take_heads consumes tosses in the identical order as
// next_bit, just 64 at a time via popcount.
class CoinStream {
public:
  CoinStream(std::uint64_t seed, std::uint64_t trial)
      : key_(trial_key(seed, trial)) {}

  bool next_bit() {
    if (avail_ == 0) refill();
    bool b = (word_ & 1u) != 0;
    word_ >>= 1;
    --avail_;
    return b;
  }

  // Number of heads among the next `count` tosses.
  std::uint64_t take_heads(std::uint64_t count) {
    std::uint64_t heads = 0;
    if (avail_ > 0) {
      unsigned take =
          static_cast<unsigned>(std::min<std::uint64_t>(avail_, count));
      std::uint64_t mask = (take >= 64) ? ~0ull : ((1ull << take) - 1);
      heads += static_cast<std::uint64_t>(std::popcount(word_ & mask));
      word_ >>= take;
      avail_ -= take;
      count -= take;
    }
    while (count >= 64) {
      heads += static_cast<std::uint64_t>(std::popcount(next_word()));
      count -= 64;
    }
    if (count > 0) {
      refill();
      std::uint64_t mask = (1ull << count) - 1;
      heads += static_cast<std::uint64_t>(std::popcount(word_ & mask));
      word_ >>= count;
      avail_ -= static_cast<unsigned>(count);
    }
    return heads;
  }

private:
  void refill() {
    word_ = next_word();
    avail_ = 64;
  }
  std::uint64_t next_word() { return mix64(key_ + (++ctr_) * kSplitmixGamma); }

  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
  std::uint64_t word_ = 0;
  unsigned avail_ = 0;
};

} // namespace evscale
