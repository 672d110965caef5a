#pragma once

#include <array>
#include <cstdint>

namespace ubm {

/// Philox4x32-10 block function (Salmon et al., SC'11). Maps a 128-bit counter
/// under a 64-bit key to 128 pseudo-random bits; a bijection in the counter for
/// every fixed key.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                         std::array<std::uint32_t, 2> key) noexcept;

/// Counter-based random stream keyed by (master_seed, stream_id).
///
/// Draw i of a stream is a pure function of (master_seed, stream_id, i), so a
/// replica produces the same numbers regardless of which worker runs it or in
/// which order replicas are scheduled. Normals come from Box-Muller on the two
/// 53-bit uniforms of one Philox block; no platform-specific distribution
/// objects are involved.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id) noexcept
      : master_seed_(master_seed), stream_id_(stream_id) {}

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Number of Philox blocks consumed so far.
  std::uint64_t blocks_used() const noexcept { return block_; }

  /// Uniform on (0, 1].
  double uniform() noexcept;

  /// Standard normal.
  double normal() noexcept;

 private:
  std::array<std::uint32_t, 4> next_block() noexcept;

  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

inline RngStream derive_stream(std::uint64_t master_seed, std::uint64_t stream_id) noexcept {
  return RngStream(master_seed, stream_id);
}

}  // namespace ubm
