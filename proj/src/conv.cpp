#include "fqms/conv.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <map>
#include <mutex>

namespace fqms {

ValuePmf conv_direct(const ValuePmf& a, const ValuePmf& b) {
  ValuePmf out(a.lo + b.lo, a.size() + b.size() - 1);
  const double* pa = a.p.data();
  double* po = out.p.data();
  const std::size_t na = a.size();
  for (std::size_t j = 0; j < b.size(); ++j) {
    const double bj = b.p[j];
    if (bj == 0.0) continue;
    double* dst = po + j;
    for (std::size_t i = 0; i < na; ++i) dst[i] += pa[i] * bj;
  }
  return out;
}

namespace {

std::size_t fft_length(std::size_t need) {
  std::size_t L = 16;
  while (L < need) L <<= 1;
  return L;
}

struct FftPlans {
  fftw_plan fwd = nullptr, inv = nullptr;
};

// Plans are created FFTW_UNALIGNED so they can execute on any caller buffer.
FftPlans plans_for(std::size_t L) {
  static std::map<std::size_t, FftPlans> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(L);
  if (it != cache.end()) return it->second;
  std::vector<double> re(L, 0.0);
  std::vector<double> cx(2 * (L / 2 + 1), 0.0);
  FftPlans pl;
  pl.fwd = fftw_plan_dft_r2c_1d(static_cast<int>(L), re.data(),
                                reinterpret_cast<fftw_complex*>(cx.data()),
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
  pl.inv = fftw_plan_dft_c2r_1d(static_cast<int>(L), reinterpret_cast<fftw_complex*>(cx.data()),
                                re.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache[L] = pl;
  return pl;
}

void forward_fft(const double* src, std::size_t n, std::size_t L, std::vector<double>& cx) {
  std::vector<double> re(L, 0.0);
  std::memcpy(re.data(), src, n * sizeof(double));
  cx.assign(2 * (L / 2 + 1), 0.0);
  fftw_execute_dft_r2c(plans_for(L).fwd, re.data(), reinterpret_cast<fftw_complex*>(cx.data()));
}

void inverse_fft(std::vector<double>& cx, std::size_t L, double* dst, std::size_t n) {
  std::vector<double> re(L, 0.0);
  fftw_execute_dft_c2r(plans_for(L).inv, reinterpret_cast<fftw_complex*>(cx.data()), re.data());
  const double scale = 1.0 / static_cast<double>(L);
  for (std::size_t i = 0; i < n; ++i) dst[i] = re[i] * scale;
}

void cmul(const std::vector<double>& a, const std::vector<double>& b, std::vector<double>& out) {
  out.resize(a.size());
  for (std::size_t k = 0; k + 1 < a.size(); k += 2) {
    double ar = a[k], ai = a[k + 1], br = b[k], bi = b[k + 1];
    out[k] = ar * br - ai * bi;
    out[k + 1] = ar * bi + ai * br;
  }
}

constexpr std::size_t kFftThreshold = 60000;  // product of operand sizes

}  // namespace

ValuePmf conv_fft(const ValuePmf& a, const ValuePmf& b) {
  const std::size_t n_out = a.size() + b.size() - 1;
  const std::size_t L = fft_length(n_out);
  std::vector<double> fa, fb, fc;
  forward_fft(a.p.data(), a.size(), L, fa);
  forward_fft(b.p.data(), b.size(), L, fb);
  cmul(fa, fb, fc);
  ValuePmf out(a.lo + b.lo, n_out);
  inverse_fft(fc, L, out.p.data(), n_out);
  for (double& x : out.p)
    if (x < 0.0) x = 0.0;
  return out;
}

ValuePmf conv_auto(const ValuePmf& a, const ValuePmf& b) {
  if (a.size() * b.size() >= kFftThreshold) return conv_fft(a, b);
  return conv_direct(a, b);
}

void saturate_fold(ValuePmf& f, int vmax) {
  if (f.lo >= -vmax && f.hi() <= vmax) return;
  ValuePmf out(std::max(f.lo, -vmax), 0);
  int hi = std::min(f.hi(), vmax);
  out.p.assign(static_cast<std::size_t>(hi - out.lo + 1), 0.0);
  for (int v = f.lo; v <= f.hi(); ++v) {
    int w = std::clamp(v, -vmax, vmax);
    out.ref(w) += f.at(v);
  }
  f = std::move(out);
}

void vn_combine(const ValuePmf& ch, const std::vector<const ValuePmf*>& msgs,
                ValuePmf& posterior, std::vector<ValuePmf>& extrinsics, VnScratch& scratch) {
  const std::size_t n = msgs.size();
  extrinsics.resize(n);
  if (n == 0) {
    posterior = ch;
    return;
  }

  std::size_t post_size = ch.size();
  std::size_t max_msg = 0;
  int lo_all = ch.lo;
  for (auto* m : msgs) {
    post_size += m->size() - 1;
    max_msg = std::max(max_msg, m->size());
    lo_all += m->lo;
  }

  if (post_size * max_msg < kFftThreshold) {
    // Prefix sums A[k] = ch (+) m_0 (+) ... (+) m_{k-1}; suffix S[k] likewise
    // from the right.  extr_k = A[k] (+) S[k+1].
    std::vector<ValuePmf> A(n + 1), S(n + 1);
    A[0] = ch;
    for (std::size_t k = 0; k < n; ++k) A[k + 1] = conv_direct(A[k], *msgs[k]);
    S[n - 1] = *msgs[n - 1];
    for (std::size_t k = n - 1; k-- > 0;) S[k] = conv_direct(*msgs[k], S[k + 1]);
    posterior = std::move(A[n]);
    for (std::size_t k = 0; k < n; ++k)
      extrinsics[k] = (k + 1 < n) ? conv_direct(A[k], S[k + 1]) : std::move(A[k]);
    return;
  }

  // Shared-transform path: one forward FFT per input, one inverse per output.
  const std::size_t L = fft_length(post_size);
  auto& fwd = scratch.fwd_re;  // fwd[k] = transform of ch * m_0 * ... * m_{k-1}
  auto& bwd = scratch.bwd_re;  // bwd[k] = transform of m_k * ... * m_{n-1}
  fwd.resize(n + 1);
  bwd.resize(n + 1);
  std::vector<double> mk;
  forward_fft(ch.p.data(), ch.size(), L, fwd[0]);
  for (std::size_t k = 0; k < n; ++k) {
    forward_fft(msgs[k]->p.data(), msgs[k]->size(), L, mk);
    cmul(fwd[k], mk, fwd[k + 1]);
  }
  forward_fft(msgs[n - 1]->p.data(), msgs[n - 1]->size(), L, bwd[n - 1]);
  for (std::size_t k = n - 1; k-- > 0;) {
    forward_fft(msgs[k]->p.data(), msgs[k]->size(), L, mk);
    cmul(mk, bwd[k + 1], bwd[k]);
  }

  auto finish = [&](std::vector<double>& cx, int lo, std::size_t sz) {
    ValuePmf out(lo, sz);
    inverse_fft(cx, L, out.p.data(), sz);
    for (double& x : out.p)
      if (x < 0.0) x = 0.0;
    return out;
  };

  posterior = finish(fwd[n], lo_all, post_size);
  std::vector<double> prod;
  for (std::size_t k = 0; k < n; ++k) {
    int lo = lo_all - msgs[k]->lo;
    std::size_t sz = post_size - (msgs[k]->size() - 1);
    if (k + 1 < n) {
      cmul(fwd[k], bwd[k + 1], prod);
      extrinsics[k] = finish(prod, lo, sz);
    } else {
      extrinsics[k] = finish(fwd[k], lo, sz);
    }
  }
}

}  // namespace fqms
