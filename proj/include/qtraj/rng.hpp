#pragma once

#include <array>
#include <cstdint>

namespace qtraj {

// Philox4x32 with 10 rounds.  Counter-based: the stream for a given key is a
// pure function of the block index, so trajectories can be assigned
// independent streams that never overlap and do not depend on scheduling.
struct Philox4x32 {
  static std::array<uint32_t, 4> block(uint64_t key, uint64_t counter);
};

enum class StreamPurpose : uint32_t {
  Outcome = 1,   // discrete measurement outcome draws
  Brownian = 2,  // diffusive increments, one channel per noise
  Jump = 3,      // jump thinning uniforms, one channel per jump
  Misc = 4,
};

// Mixes (master seed, path index, channel, purpose) into a stream key.
// splitmix64-style finalizers; distinct tuples give unrelated streams.
uint64_t derive_stream_key(uint64_t master, uint64_t path, uint32_t channel,
                           StreamPurpose purpose);

class RandomStream {
public:
  explicit RandomStream(uint64_t key) : key_(key) {}

  uint32_t next_u32();
  uint64_t next_u64();
  // Uniform on (0,1]; never returns 0 so logs are safe.
  double next_uniform();
  // Standard normal via Box-Muller; draws are cached in pairs.
  double next_gaussian();

private:
  uint64_t key_ = 0;
  uint64_t counter_ = 0;
  std::array<uint32_t, 4> buf_{};
  int pos_ = 4;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace qtraj
