#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace aniso {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11 constants:
/// multipliers 0xD2511F53, 0xCD9E8D57; Weyl keys 0x9E3779B9, 0xBB67AE85).
///
/// Streams are independent substreams of one seed: the stream id occupies the
/// upper 64 bits of the 128-bit counter, the draw index the lower 64 bits, and
/// the key is the seed. Everything is integer arithmetic plus one fixed
/// 53-bit-mantissa conversion, so sequences are identical across platforms,
/// thread counts and execution orders.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  std::uint64_t next_u64() {
    if (buffer_pos_ == 2) {
      const auto block = philox_block(counter_++);
      buffer_[0] = block[0] | (static_cast<std::uint64_t>(block[1]) << 32);
      buffer_[1] = block[2] | (static_cast<std::uint64_t>(block[3]) << 32);
      buffer_pos_ = 0;
    }
    return buffer_[buffer_pos_++];
  }

  /// Uniform double in [0, 1): 53 mantissa bits of one 64-bit draw.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1]; safe as a log argument.
  double uniform_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  /// Exponential waiting time via inverse CDF (fixed formula, no library
  /// distribution, so results are reproducible across standard libraries).
  double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

 private:
  std::array<std::uint32_t, 4> philox_block(std::uint64_t index) const {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    std::uint32_t c0 = static_cast<std::uint32_t>(index);
    std::uint32_t c1 = static_cast<std::uint32_t>(index >> 32);
    std::uint32_t c2 = static_cast<std::uint32_t>(stream_);
    std::uint32_t c3 = static_cast<std::uint32_t>(stream_ >> 32);
    std::uint32_t k0 = static_cast<std::uint32_t>(seed_);
    std::uint32_t k1 = static_cast<std::uint32_t>(seed_ >> 32);
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * c0;
      const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * c2;
      const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
      const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
      const std::uint32_t n0 = hi1 ^ c1 ^ k0;
      const std::uint32_t n1 = lo1;
      const std::uint32_t n2 = hi0 ^ c3 ^ k1;
      const std::uint32_t n3 = lo0;
      c0 = n0;
      c1 = n1;
      c2 = n2;
      c3 = n3;
      k0 += W0;
      k1 += W1;
    }
    return {c0, c1, c2, c3};
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffer_pos_ = 2;
};

}  // namespace aniso
