#pragma once

#include <vector>

#include "fqms/pmf.hpp"
#include "fqms/rng.hpp"

namespace fqms {

// Sign-magnitude codec for a `width`-bit word: MSB is the sign, the rest the
// magnitude.  The pattern "-0" decodes to value 0.
inline int sm_encode(int v, int width) {
  return v < 0 ? ((1 << (width - 1)) | -v) : v;
}
inline int sm_decode(int pattern, int width) {
  int mag = pattern & ((1 << (width - 1)) - 1);
  return (pattern >> (width - 1)) ? -mag : mag;
}

// Unreliable memory port: every read XORs an independent Bernoulli(eps)
// pattern over all `width` bits of the stored word.  The flip mask is drawn
// from a precomputed cumulative table, with a fast path for the (common)
// no-flip case.
struct FaultChannel {
  int width = 0;
  double eps = 0.0;

  FaultChannel() = default;
  FaultChannel(int width_, double eps_);

  int read(int v, SplitMix64& rng) const {
    if (eps == 0.0) return v;
    double u = rng.next_double();
    if (u < p_clean_) return v;
    return sm_decode(sm_encode(v, width) ^ draw_mask(u), width);
  }

  int draw_mask(double u) const;  // lower_bound over the cumulative table

 private:
  double p_clean_ = 1.0;          // (1-eps)^width
  std::vector<double> cum_;       // cumulative P(mask <= k), k = 0..2^width-1
};

// The same noise as a linear operator on message pmfs over {-Q..Q} for
// q-bit words: lift values to bit patterns, mix each bit independently,
// fold "-0" back onto 0.  apply() runs the O(q 2^q) butterfly; matrix()
// materializes T[v][w] for tests and small-scale checks.
struct FaultOperator {
  int q = 0;
  double eps = 0.0;

  FaultOperator() = default;
  FaultOperator(int q_, double eps_) : q(q_), eps(eps_) {}

  void apply(ValuePmf& f) const;
  // Row-major (2Q+1)^2: row = stored value v, column = read value w.
  std::vector<double> matrix() const;
};

}  // namespace fqms
