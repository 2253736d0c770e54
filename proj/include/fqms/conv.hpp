#pragma once

#include <vector>

#include "fqms/pmf.hpp"

namespace fqms {

// Linear convolution of two pmfs (sum of independent variables).
ValuePmf conv_direct(const ValuePmf& a, const ValuePmf& b);

// Same contract, FFT-backed; used automatically above a size threshold where
// it wins.  Round-off introduces ~1e-15 absolute noise per bin; callers that
// need exact tails (small alphabets) stay on the direct path.
ValuePmf conv_fft(const ValuePmf& a, const ValuePmf& b);
ValuePmf conv_auto(const ValuePmf& a, const ValuePmf& b);

// Fold all mass outside [-vmax, vmax] onto the boundary values.
void saturate_fold(ValuePmf& f, int vmax);

// Batched variable-node combination: given the channel pmf and n incoming
// message pmfs, produce the full sum (posterior) and the n leave-one-out
// sums (extrinsics), all as exact linear convolutions.  Picks direct
// prefix/suffix convolution for small problems and a shared-transform FFT
// path for large ones (one forward transform per input, one inverse per
// output).
struct VnScratch {
  std::vector<std::vector<double>> fwd_re, fwd_im, bwd_re, bwd_im;
  std::vector<double> tmp;
};

void vn_combine(const ValuePmf& ch, const std::vector<const ValuePmf*>& msgs,
                ValuePmf& posterior, std::vector<ValuePmf>& extrinsics,
                VnScratch& scratch);

}  // namespace fqms
