#include "fqms/density_evolution.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "fqms/channel.hpp"
#include "fqms/common.hpp"
#include "fqms/conv.hpp"
#include "fqms/fault.hpp"

namespace fqms {

ValuePmf cn_pair(const ValuePmf& a, const ValuePmf& b) {
  assert(a.lo == -a.hi() && b.lo == -b.hi());
  const int Wa = -a.lo, Wb = -b.lo;
  const int W = std::min(Wa, Wb);
  ValuePmf out;
  out.lo = -W;
  out.p.assign(2 * static_cast<std::size_t>(W) + 1, 0.0);
  // Strict upper tails per sign: tp[m] = P(value > +m), tn[m] = P(value < -m).
  // The min magnitude never exceeds W, so tails beyond W collapse into the
  // m = W entries.
  std::vector<double> tpa(W + 1, 0.0), tna(W + 1, 0.0);
  std::vector<double> tpb(W + 1, 0.0), tnb(W + 1, 0.0);
  for (int v = W + 1; v <= Wa; ++v) {
    tpa[W] += a.at(v);
    tna[W] += a.at(-v);
  }
  for (int v = W + 1; v <= Wb; ++v) {
    tpb[W] += b.at(v);
    tnb[W] += b.at(-v);
  }
  for (int m = W - 1; m >= 0; --m) {
    tpa[m] = tpa[m + 1] + a.at(m + 1);
    tna[m] = tna[m + 1] + a.at(-(m + 1));
    tpb[m] = tpb[m + 1] + b.at(m + 1);
    tnb[m] = tnb[m + 1] + b.at(-(m + 1));
  }
  const double a0 = a.at(0), b0 = b.at(0);
  out.ref(0) = a0 + b0 - a0 * b0;
  for (int m = 1; m <= W; ++m) {
    const double pa = a.at(m), na = a.at(-m);
    const double pb = b.at(m), nb = b.at(-m);
    // Output +m: equal signs, min magnitude exactly m.
    out.ref(m) = pa * tpb[m] + pb * tpa[m] + pa * pb +
                 na * tnb[m] + nb * tna[m] + na * nb;
    // Output -m: opposite signs, min magnitude exactly m.
    out.ref(-m) = pa * tnb[m] + na * tpb[m] + pb * tna[m] + nb * tpa[m] +
                  pa * nb + na * pb;
  }
  return out;
}

ValuePmf apply_offset(const ValuePmf& f, int lambda, int Q) {
  assert(f.lo == -f.hi());
  const int Wf = -f.lo;
  if (lambda <= 0 && Wf <= Q) return f;
  ValuePmf out;
  out.lo = -Q;
  out.p.assign(2 * static_cast<std::size_t>(Q) + 1, 0.0);
  double zero = f.at(0);
  for (int m = 1; m <= std::min(lambda, Wf); ++m) zero += f.at(m) + f.at(-m);
  out.ref(0) = zero;
  for (int m = lambda + 1; m <= Wf; ++m) {
    const int t = std::min(m - lambda, Q);  // saturate at the stored width
    out.ref(t) += f.at(m);
    out.ref(-t) += f.at(-m);
  }
  return out;
}

namespace {

struct EdgeType {
  int j, i, mult;
};

std::vector<EdgeType> edge_types(const Protograph& p) {
  std::vector<EdgeType> t;
  for (int j = 0; j < p.m; ++j)
    for (int i = 0; i < p.n; ++i)
      if (p.at(j, i) > 0) t.push_back({j, i, p.at(j, i)});
  return t;
}

}  // namespace

DeTrace de_run(const Protograph& proto, const DeConfig& cfg, double snr_db) {
  const int Q = msg_max(cfg.q);
  const DegreeProfile deg = proto.degrees();
  const std::vector<EdgeType> types = edge_types(proto);
  const int T = static_cast<int>(types.size());

  const ChannelParams ch{snr_db, cfg.alpha};
  const ValuePmf ch_pmf = channel_pmf(cfg.q, ch);
  FaultOperator mem(cfg.q, cfg.eps);
  const bool faulty = cfg.eps > 0.0;
  // (q + q_s)-bit posterior accumulator: every on-the-fly message stays
  // within +-B, so a unit mass at the widest reachable magnitude is the
  // identity of the pairwise check-node law.
  const int B = (1 << (cfg.q + cfg.q_s - 1)) - 1;
  const int W_n = std::max(Q, std::min(deg.max_dv * Q, B));
  const ValuePmf neutral = unit_pmf(W_n, W_n);

  std::vector<ValuePmf> v2c(T, ch_pmf), c2v(T);

  DeTrace tr;
  tr.pe.assign(cfg.flood_iters + 1, 0.0);
  tr.pe[0] = ch_pmf.error_prob();

  VnScratch scratch;
  std::vector<const ValuePmf*> in_ptrs;
  std::vector<ValuePmf> fwd, bwd, extr;
  std::vector<int> inst_type, first_pos;

  int l = 1;
  for (; l <= cfg.flood_iters; ++l) {
    // --- Check-node update, one combined output per edge type ---
    for (int j = 0; j < proto.m; ++j) {
      inst_type.clear();
      first_pos.assign(T, -1);
      for (int t = 0; t < T; ++t) {
        if (types[t].j != j) continue;
        first_pos[t] = static_cast<int>(inst_type.size());
        for (int c = 0; c < types[t].mult; ++c) inst_type.push_back(t);
      }
      const int d = static_cast<int>(inst_type.size());
      assert(d == deg.d_c[j]);
      fwd.assign(d + 1, ValuePmf{});
      bwd.assign(d + 1, ValuePmf{});
      fwd[0] = neutral;
      bwd[d] = neutral;
      for (int k = 0; k < d; ++k)
        fwd[k + 1] = cn_pair(fwd[k], v2c[inst_type[k]]);
      for (int k = d - 1; k >= 0; --k)
        bwd[k] = cn_pair(v2c[inst_type[k]], bwd[k + 1]);
      for (int t = 0; t < T; ++t) {
        if (first_pos[t] < 0) continue;
        const int k = first_pos[t];
        ValuePmf e = cn_pair(fwd[k], bwd[k + 1]);
        e = apply_offset(e, cfg.lambda, Q);
        if (faulty) mem.apply(e);
        e.cleanup();
        c2v[t] = std::move(e);
      }
    }

    // --- Variable-node update ---
    double pe_sum = 0.0;
    for (int i = 0; i < proto.n; ++i) {
      in_ptrs.clear();
      std::vector<int> owner;  // edge type observing each instance slot
      for (int t = 0; t < T; ++t) {
        if (types[t].i != i) continue;
        for (int c = 0; c < types[t].mult; ++c) {
          in_ptrs.push_back(&c2v[t]);
          owner.push_back(c == 0 ? t : -1);
        }
      }
      ValuePmf posterior;
      extr.assign(in_ptrs.size(), ValuePmf{});
      vn_combine(ch_pmf, in_ptrs, posterior, extr, scratch);
      posterior.cleanup();
      pe_sum += posterior.error_prob();
      for (size_t k = 0; k < owner.size(); ++k) {
        if (owner[k] < 0) continue;
        // The outgoing message is the wide accumulator minus one stored
        // input; it is not quantized.  The fold below only models the
        // accumulator's own rails and never binds for degrees that fit
        // the q_s guard bits.
        saturate_fold(extr[k], B);
        extr[k].cleanup();
        v2c[owner[k]] = std::move(extr[k]);
      }
    }
    tr.pe[l] = pe_sum / proto.n;

    if (tr.pe[l] < 1e-12 ||
        std::abs(tr.pe[l] - tr.pe[l - 1]) < 1e-14) {
      for (int k = l + 1; k <= cfg.flood_iters; ++k) tr.pe[k] = tr.pe[l];
      break;
    }
  }
  tr.iters_run = std::min(l, cfg.flood_iters);
  return tr;
}

DeTrace de_run_at_p0(const Protograph& proto, const DeConfig& cfg, double x) {
  return de_run(proto, cfg, snr_db_of_p0(x));
}

double de_threshold(const Protograph& proto, const DeConfig& cfg,
                    double target_pe, double lo_db, double hi_db,
                    double tol_db) {
  if (hi_db <= lo_db) throw config_error("threshold: empty SNR interval");
  auto ok = [&](double snr) {
    return de_run(proto, cfg, snr).pe.back() <= target_pe;
  };
  if (!ok(hi_db))
    throw infeasible_error("threshold: target error rate not reached at "
                           "upper end of SNR interval");
  if (ok(lo_db)) return lo_db;
  double lo = lo_db, hi = hi_db;
  while (hi - lo > tol_db) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace fqms
