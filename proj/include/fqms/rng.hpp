#pragma once

#include <cmath>
#include <cstdint>

namespace fqms {

// 64-bit finalizer used both as the RNG output stage and for key derivation.
inline uint64_t mix64(uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

// Counter-based generator: state advances by a fixed odd constant and the
// output is a bijective mix of the counter.  Streams with different keys are
// independent for our purposes, and a stream can be reproduced from its key
// alone, which is what makes frame-parallel simulation deterministic.
struct SplitMix64 {
  uint64_t state = 0;

  explicit SplitMix64(uint64_t key = 0) : state(key) {}

  uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    return mix64(state);
  }

  // Uniform in [0,1) with 53 random bits.
  double next_double() { return (next() >> 11) * 0x1.0p-53; }

  // Marsaglia polar method; deterministic given the stream.
  double next_gauss() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * next_double() - 1.0;
      v = 2.0 * next_double() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

 private:
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Key-derivation scheme for per-frame, per-memory streams.  Documented
// contract: stream(seed, frame, mem) = SplitMix64 keyed by chained mixes,
// so any worker can regenerate any frame's noise without coordination.
enum : uint64_t {
  kMemChannel = 0x6368616eull,  // AWGN samples for a frame
  kMemBeta = 0x62657461ull,     // posterior-memory read faults
  kMemGamma = 0x67616d6dull,    // message-memory read faults
  kMemLift = 0x6c696674ull,     // circulant-shift selection
};

inline uint64_t derive_key(uint64_t master, uint64_t a, uint64_t b) {
  return mix64(mix64(master ^ 0x243F6A8885A308D3ull) ^ mix64(a) ^ (b * 0x9E3779B97F4A7C15ull));
}

inline SplitMix64 frame_stream(uint64_t master, uint64_t frame, uint64_t mem) {
  return SplitMix64(derive_key(master, frame, mem));
}

}  // namespace fqms
