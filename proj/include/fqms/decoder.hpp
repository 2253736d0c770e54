#pragma once

#include <cstdint>
#include <vector>

#include "fqms/channel.hpp"
#include "fqms/protograph.hpp"

namespace fqms {

enum class FaultModel { none, hardware, simplified };
enum class Schedule { layered, flooding };

struct DecoderConfig {
  int q = 5;
  double alpha = 1.0;
  int lambda = 0;            // min-sum offset
  double eps = 0.0;          // memory read fault probability per bit
  int max_iters = 50;        // full iterations of the selected schedule
  FaultModel fault_model = FaultModel::none;
  Schedule schedule = Schedule::layered;
  bool force_full_iters = false;  // disable syndrome early stopping
};

struct DecodeResult {
  std::vector<uint8_t> hard;  // decided bits, 1 = negative posterior
  bool converged = false;
  int iters = 0;
  // Energy-model accounting: posterior writes count (q + q_s) bits each and
  // every check-node update counts (1 - R) * (2q + d_c - 2) bits, matching
  // the per-information-bit energy expression exactly.
  double bits_written = 0.0;
  int64_t beta_writes = 0;               // raw write events
  std::vector<int64_t> cn_updates;       // per protograph row class
};

// Quantized offset Min-Sum with unreliable memory reads.
//
// Hardware model: every read of a stored posterior (beta) or message (gamma)
// flips each of its sign-magnitude bits independently with probability eps;
// the noisy old-message sample is shared between the extrinsic subtraction
// and the posterior update (one physical read).  Simplified model: noise is
// applied exactly once per message per iteration, to the fresh check-node
// outputs, with fault-free posterior reads.  With eps = 0 all models are
// bitwise identical.
//
// The per-frame RNG streams are derived from (master_seed, frame_index), so
// any frame can be reproduced in isolation.
DecodeResult decode(const std::vector<double>& y, const LiftedCode& code,
                    const ChannelParams& ch, const DecoderConfig& cfg,
                    uint64_t master_seed, uint64_t frame_index);

}  // namespace fqms
