#include "fqms/decoder.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "fqms/fault.hpp"
#include "fqms/rng.hpp"

namespace fqms {
namespace {

inline int clamp_int(int v, int lo, int hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

// Hard decision from a stored posterior: zero counts as non-negative.
inline uint8_t hard_bit(int beta) { return beta < 0 ? 1 : 0; }

}  // namespace

DecodeResult decode(const std::vector<double>& y, const LiftedCode& code,
                    const ChannelParams& ch, const DecoderConfig& cfg,
                    uint64_t master_seed, uint64_t frame_index) {
  const int n_vars = code.N;
  const int n_checks = code.M;
  const DegreeProfile deg = code.proto.degrees();
  const int Q = msg_max(cfg.q);
  const int B = acc_max(cfg.q, deg.q_s);
  const double sigma2 = ch.sigma2();

  SplitMix64 beta_rng = frame_stream(master_seed, frame_index, kMemBeta);
  SplitMix64 gamma_rng = frame_stream(master_seed, frame_index, kMemGamma);
  FaultChannel beta_mem(cfg.q + deg.q_s, cfg.eps);
  FaultChannel gamma_mem(cfg.q, cfg.eps);
  const bool hw = cfg.fault_model == FaultModel::hardware;
  const bool simp = cfg.fault_model == FaultModel::simplified;

  // Posterior per variable node, message per edge (slot order of cn_vn).
  std::vector<int> beta(n_vars);
  for (int v = 0; v < n_vars; ++v)
    beta[v] = quantize(llr(y[v], sigma2, ch.alpha), cfg.q);
  std::vector<int> gamma(code.cn_vn.size(), 0);

  DecodeResult res;
  res.cn_updates.assign(code.proto.m, 0);

  std::vector<int> ins(deg.max_dc), noisy_old(deg.max_dc);
  std::vector<int> out_store(deg.max_dc), out_sub(deg.max_dc);
  // Flooding scratch: new message and subtracted sample for every edge.
  std::vector<int> store_all, sub_all;
  if (cfg.schedule == Schedule::flooding) {
    store_all.resize(gamma.size());
    sub_all.resize(gamma.size());
  }

  // Computes new outgoing messages for one check node.  Reads follow the
  // fault model; outputs go to store (value to write back) and sub (value
  // subtracted from the posterior alongside the write).
  auto process_cn = [&](int c, int* store, int* sub) {
    const int begin = code.cn_offset[c];
    const int d = code.cn_offset[c + 1] - begin;
    // Incoming differences live on the wide accumulator range [-B-Q, B+Q];
    // the sentinel just has to sit above that.
    int min1 = B + Q + 1, min2 = B + Q + 1, min_pos = -1;
    unsigned sign_all = 0;
    for (int k = 0; k < d; ++k) {
      const int e = begin + k;
      const int v = code.cn_vn[e];
      int g = gamma[e];
      int b = beta[v];
      if (hw) {
        g = gamma_mem.read(g, gamma_rng);
        b = beta_mem.read(b, beta_rng);
      }
      noisy_old[k] = g;
      // Extrinsic input computed on the fly at full width; no quantization
      // happens before the minimum search.
      const int in = b - g;
      ins[k] = in;
      const int mag = in < 0 ? -in : in;
      if (mag < min1) {
        min2 = min1;
        min1 = mag;
        min_pos = k;
      } else if (mag < min2) {
        min2 = mag;
      }
      sign_all ^= static_cast<unsigned>(in < 0);
    }
    for (int k = 0; k < d; ++k) {
      int mag = (k == min_pos) ? min2 : min1;
      mag -= cfg.lambda;
      if (mag < 0) mag = 0;
      if (mag > Q) mag = Q;  // saturate to the stored q-bit message width
      const unsigned neg = sign_all ^ static_cast<unsigned>(ins[k] < 0);
      int out = neg ? -mag : mag;
      const int e = begin + k;
      if (simp) {
        // One noisy event per message per iteration, at update time; the
        // noisy value is both stored and accumulated.
        out = gamma_mem.read(out, gamma_rng);
        store[k] = out;
        sub[k] = gamma[e];
      } else {
        store[k] = out;
        // Reuse the same read sample taken for the extrinsic input.
        sub[k] = hw ? noisy_old[k] : gamma[e];
      }
    }
  };

  auto apply_cn = [&](int c, const int* store, const int* sub) {
    const int begin = code.cn_offset[c];
    const int d = code.cn_offset[c + 1] - begin;
    for (int k = 0; k < d; ++k) {
      const int e = begin + k;
      const int v = code.cn_vn[e];
      beta[v] = clamp_int(beta[v] + store[k] - sub[k], -B, B);
      gamma[e] = store[k];
    }
    res.beta_writes += d;
    res.cn_updates[c / code.Z] += 1;
  };

  auto syndrome_clear = [&]() {
    for (int c = 0; c < n_checks; ++c) {
      unsigned parity = 0;
      for (int e = code.cn_offset[c]; e < code.cn_offset[c + 1]; ++e)
        parity ^= hard_bit(beta[code.cn_vn[e]]);
      if (parity) return false;
    }
    return true;
  };

  bool converged = false;
  int iters = 0;
  for (int it = 0; it < cfg.max_iters; ++it) {
    if (cfg.schedule == Schedule::layered) {
      for (int j = 0; j < code.proto.m; ++j) {
        const int c0 = j * code.Z;
        for (int c = c0; c < c0 + code.Z; ++c) {
          process_cn(c, out_store.data(), out_sub.data());
          apply_cn(c, out_store.data(), out_sub.data());
        }
      }
    } else {
      for (int c = 0; c < n_checks; ++c)
        process_cn(c, store_all.data() + code.cn_offset[c],
                   sub_all.data() + code.cn_offset[c]);
      for (int c = 0; c < n_checks; ++c)
        apply_cn(c, store_all.data() + code.cn_offset[c],
                 sub_all.data() + code.cn_offset[c]);
    }
    ++iters;
    if (!cfg.force_full_iters && syndrome_clear()) {
      converged = true;
      break;
    }
  }
  if (cfg.force_full_iters) converged = syndrome_clear();

  res.hard.resize(n_vars);
  for (int v = 0; v < n_vars; ++v) res.hard[v] = hard_bit(beta[v]);
  res.converged = converged;
  res.iters = iters;

  double cn_bits = 0.0;
  for (int j = 0; j < code.proto.m; ++j)
    cn_bits += static_cast<double>(res.cn_updates[j]) *
               (2 * cfg.q + deg.d_c[j] - 2);
  const double one_minus_rate =
      static_cast<double>(code.proto.m) / code.proto.n;
  res.bits_written =
      static_cast<double>(res.beta_writes) * (cfg.q + deg.q_s) +
      one_minus_rate * cn_bits;
  return res;
}

}  // namespace fqms
