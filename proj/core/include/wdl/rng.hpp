#pragma once

#include <array>
#include <cstdint>

namespace wdl {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Stream identifiers.  A stream is addressed by (seed, stream id); within a
/// stream, draws are addressed by a 64-bit block index, so any draw can be
/// regenerated without replaying the ones before it.
enum class StreamTag : std::uint32_t {
  kModeInit = 1,
  kModeNoise = 2,
  kDirection = 3,
  kFbm = 4,
  kBrownian = 5,
  kLevy = 6,
  kRealization = 7,
  kTest = 99,
};

/// Mixes (tag, a, b) into a 64-bit stream id (splitmix64 finalizer chain).
std::uint64_t stream_id(StreamTag tag, std::uint64_t a = 0, std::uint64_t b = 0);
/// Derives a child seed from a master seed; used for per-realization media.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Counter-based generator.  Key = seed; counter words 0-1 hold the block index,
/// words 2-3 the stream id.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t block = 0);

  /// Positions the stream at a block index; subsequent draws start there.
  void seek(std::uint64_t block);
  std::uint64_t block() const { return block_; }

  std::uint32_t next_u32();
  /// Uniform in (0, 1), 53-bit resolution, never 0 or 1.
  double uniform();
  double normal();
  /// Two independent normals (Box-Muller on one block).
  std::array<double, 2> normal_pair();

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_;
  std::array<std::uint32_t, 4> buf_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace wdl
