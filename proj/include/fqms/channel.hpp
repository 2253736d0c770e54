#pragma once

#include <cmath>
#include <vector>

#include "fqms/pmf.hpp"

namespace fqms {

// Messages live on {-Q..Q} with Q = 2^(q-1) - 1 (sign-magnitude alphabet).
inline int msg_max(int q) { return (1 << (q - 1)) - 1; }
// Posterior accumulators carry q_s guard bits: range +/- (2^(q+q_s-1) - 1).
inline int acc_max(int q, int q_s) { return (1 << (q + q_s - 1)) - 1; }

// Midpoint quantizer with saturation; sign(0) = +1 so 0 maps to +0.
inline int quantize(double x, int q) {
  const int Q = msg_max(q);
  int s = (x < 0.0) ? -1 : 1;
  double mag = std::floor(std::fabs(x) + 0.5);
  double m = std::min(static_cast<double>(Q), mag);
  return s * static_cast<int>(m);
}

struct ChannelParams {
  double snr_db = 0.0;
  double alpha = 1.0;

  double snr_linear() const { return std::pow(10.0, snr_db / 10.0); }
  double sigma2() const { return std::pow(10.0, -snr_db / 10.0); }
};

// Scaled LLR for received sample y under BPSK(+1/-1), noise variance sigma2.
inline double llr(double y, double sigma2, double alpha) { return 2.0 * alpha * y / sigma2; }

// Channel crossover probability p0 = P(hard decision error) at a given SNR,
// and its inverse.  Linked through p0 = Phi(-sqrt(xi)), xi linear SNR.
double p0_of_snr_db(double snr_db);
double snr_db_of_p0(double p0);
double snr_linear_of_p0(double p0);

// Pmf of the quantized channel LLR for the all-(+1) transmit convention:
// mass at interior k is the Gaussian measure of the LLR preimage
// [k-1/2, k+1/2); the endpoints +/-Q absorb the tails.
ValuePmf channel_pmf(int q, const ChannelParams& ch);

}  // namespace fqms
