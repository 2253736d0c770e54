#pragma once

#include <vector>

#include "fqms/pmf.hpp"
#include "fqms/protograph.hpp"

namespace fqms {

// Analytical model of the quantized offset Min-Sum decoder with unreliable
// message memory: one message distribution per protograph edge type, exact
// integer-alphabet updates, flooding schedule.  Two flooding iterations
// emulate one layered iteration, so callers that think in layered
// iterations should set flood_iters to twice their layered count.
//
// Width discipline mirrors the datapath: variable-to-check messages are
// formed on the wide (q + q_s)-bit posterior accumulator and enter the
// check node unquantized; only the stored check-to-variable messages are
// saturated to the q-bit range [-Q, Q] at write-back, after the offset.
struct DeConfig {
  int q = 5;
  int q_s = 3;        // extra posterior-accumulator bits beyond q
  double alpha = 1.0;
  int lambda = 0;
  double eps = 0.0;   // per-bit fault probability on stored messages
  int flood_iters = 100;
};

struct DeTrace {
  // pe[l] = average hard-decision error probability after l flooding
  // iterations; pe[0] is the channel-only value.  Always flood_iters+1
  // entries; once the sequence converged the tail repeats the fixed point.
  std::vector<double> pe;
  int iters_run = 0;  // iterations actually computed before the fixed point
};

DeTrace de_run(const Protograph& proto, const DeConfig& cfg, double snr_db);

// Same evolution, entered by raw channel crossover probability
// x = P(sign error before quantization) instead of SNR.
DeTrace de_run_at_p0(const Protograph& proto, const DeConfig& cfg, double x);

// Exact pairwise check-node law: magnitude = min of the two inputs, sign =
// product (zero absorbs).  Inputs may live on different symmetric ranges
// [-W_a, W_a] and [-W_b, W_b]; the result lives on the smaller of the two.
// Exposed for direct verification against enumeration.
ValuePmf cn_pair(const ValuePmf& a, const ValuePmf& b);

// Offset and write-back quantization of a combined check-node output:
// magnitudes shrink by lambda (clamped at zero), then saturate to the
// stored-message range [-Q, Q]; signs are preserved.
ValuePmf apply_offset(const ValuePmf& f, int lambda, int Q);

// Smallest SNR (dB) in [lo_db, hi_db] whose fixed-point error probability
// is <= target_pe, to tol_db by bisection.  Throws infeasible_error when
// even hi_db fails the target.
double de_threshold(const Protograph& proto, const DeConfig& cfg,
                    double target_pe, double lo_db, double hi_db,
                    double tol_db = 0.01);

}  // namespace fqms
