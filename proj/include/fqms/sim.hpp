#pragma once

#include <cstdint>

#include "fqms/decoder.hpp"
#include "fqms/protograph.hpp"

namespace fqms {

struct McOptions {
  uint64_t seed = 1;
  int64_t target_frame_errors = 100;
  int64_t max_frames = 10'000'000;
  int block = 256;   // stop decisions only at block boundaries
  int workers = 1;   // worker threads within a block
};

struct McResult {
  int64_t frames = 0;
  int64_t frame_errors = 0;
  int64_t bit_errors = 0;
  int64_t iters_total = 0;
  int64_t converged_frames = 0;
  int64_t n_bits = 0;  // block length, for rate computations
  // Exact integer accounting folded to doubles once at the end, so the
  // result is independent of worker count and summation order.
  double bits_written = 0.0;

  double fer() const { return frames ? double(frame_errors) / frames : 0.0; }
  double ber() const {
    return frames ? double(bit_errors) / (double(frames) * n_bits) : 0.0;
  }
  double avg_iters() const {
    return frames ? double(iters_total) / frames : 0.0;
  }
};

// Transmits the all-zero codeword over the scaled AWGN channel and decodes
// each frame with per-frame derived random streams: frame k is bit-for-bit
// reproducible in isolation, and the aggregate is invariant to the worker
// count because stopping is decided only at block boundaries.
McResult run_campaign(const LiftedCode& code, const ChannelParams& ch,
                      const DecoderConfig& cfg, const McOptions& opts);

}  // namespace fqms
