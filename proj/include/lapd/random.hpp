/*
 * Copyright (C) 2026 The lapd-sampler Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef LAPD_RANDOM_HPP
#define LAPD_RANDOM_HPP

#include <array>
#include <cmath>
#include <cstdint>

namespace lapd {

/**
 * Philox4x32-10 counter-based generator (Salmon et al., SC'11).
 *
 * A stream is a (key, stream id) pair; the 128-bit counter is split into a
 * 64-bit block index (low words) and the 64-bit stream id (high words), so
 * distinct ids never share a counter value and stream i is a pure function
 * of (master_seed, i).
 */
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;

  Philox4x32(std::uint64_t key, std::uint64_t stream_id) noexcept
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
        stream_id_(stream_id) {}

  /// Block at an explicit counter position; does not advance the stream.
  Block block_at(std::uint64_t index) const noexcept {
    Block ctr{static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
              static_cast<std::uint32_t>(stream_id_),
              static_cast<std::uint32_t>(stream_id_ >> 32)};
    std::uint32_t k0 = key_[0];
    std::uint32_t k1 = key_[1];
    for (int round = 0; round < 10; ++round) {
      ctr = single_round(ctr, k0, k1);
      k0 += kWeyl0;
      k1 += kWeyl1;
    }
    return ctr;
  }

  Block next_block() noexcept { return block_at(index_++); }

  std::uint64_t position() const noexcept { return index_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static Block single_round(const Block& c, std::uint32_t k0, std::uint32_t k1) noexcept {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k0, static_cast<std::uint32_t>(p1),
            static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k1, static_cast<std::uint32_t>(p0)};
  }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_id_;
  std::uint64_t index_ = 0;
};

/// SplitMix64 finalizer; used to turn a user seed into a Philox key.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/**
 * Per-chain random stream producing uniforms and standard normals.
 *
 * Normals use the Marsaglia polar method on Philox blocks; the output is
 * fully determined by (master_seed, stream_id) and does not depend on the
 * standard library implementation.
 */
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint64_t stream_id) noexcept
      : engine_(mix64(master_seed), stream_id) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept {
    if (!have_spare_bits_) {
      const auto b = engine_.next_block();
      spare_bits_ = (static_cast<std::uint64_t>(b[3]) << 32) | b[2];
      have_spare_bits_ = true;
      return to_unit((static_cast<std::uint64_t>(b[1]) << 32) | b[0]);
    }
    have_spare_bits_ = false;
    return to_unit(spare_bits_);
  }

  double normal() noexcept {
    if (have_spare_normal_) {
      have_spare_normal_ = false;
      return spare_normal_;
    }
    for (;;) {
      const auto b = engine_.next_block();
      const double u = 2.0 * to_unit((static_cast<std::uint64_t>(b[1]) << 32) | b[0]) - 1.0;
      const double v = 2.0 * to_unit((static_cast<std::uint64_t>(b[3]) << 32) | b[2]) - 1.0;
      const double s = u * u + v * v;
      if (s >= 1.0 || s == 0.0) continue;
      const double scale = std::sqrt(-2.0 * std::log(s) / s);
      spare_normal_ = v * scale;
      have_spare_normal_ = true;
      return u * scale;
    }
  }

  std::uint64_t stream_id() const noexcept { return engine_.stream_id(); }

 private:
  static double to_unit(std::uint64_t x) noexcept {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
  }

  Philox4x32 engine_;
  std::uint64_t spare_bits_ = 0;
  double spare_normal_ = 0.0;
  bool have_spare_bits_ = false;
  bool have_spare_normal_ = false;
};

// Stream ids at or above this value are reserved for reference draws
// (exact target samples, projection directions) so they never collide with
// chain streams.
inline constexpr std::uint64_t kAuxStreamBase = std::uint64_t{1} << 63;

}  // namespace lapd

#endif  // LAPD_RANDOM_HPP
