#include "fqms/sim.hpp"

#include <cmath>
#include <thread>
#include <vector>

#include "fqms/common.hpp"
#include "fqms/rng.hpp"

namespace fqms {
namespace {

struct Tally {
  int64_t frames = 0, frame_errors = 0, bit_errors = 0;
  int64_t iters_total = 0, converged = 0;
  int64_t beta_writes = 0;
  std::vector<int64_t> cn_updates;

  void add(const Tally& o) {
    frames += o.frames;
    frame_errors += o.frame_errors;
    bit_errors += o.bit_errors;
    iters_total += o.iters_total;
    converged += o.converged;
    beta_writes += o.beta_writes;
    if (cn_updates.size() < o.cn_updates.size())
      cn_updates.resize(o.cn_updates.size(), 0);
    for (size_t j = 0; j < o.cn_updates.size(); ++j)
      cn_updates[j] += o.cn_updates[j];
  }
};

Tally run_frames(const LiftedCode& code, const ChannelParams& ch,
                 const DecoderConfig& cfg, uint64_t seed, int64_t first,
                 int64_t count, int stride) {
  Tally t;
  t.cn_updates.assign(code.proto.m, 0);
  const double sigma = std::sqrt(ch.sigma2());
  std::vector<double> y(code.N);
  for (int64_t k = first; k < first + count; k += stride) {
    SplitMix64 chan = frame_stream(seed, static_cast<uint64_t>(k),
                                   kMemChannel);
    for (int i = 0; i < code.N; ++i) y[i] = 1.0 + sigma * chan.next_gauss();
    const DecodeResult r =
        decode(y, code, ch, cfg, seed, static_cast<uint64_t>(k));
    int64_t wrong = 0;
    for (uint8_t b : r.hard) wrong += b;
    ++t.frames;
    if (wrong) ++t.frame_errors;
    t.bit_errors += wrong;
    t.iters_total += r.iters;
    t.converged += r.converged ? 1 : 0;
    t.beta_writes += r.beta_writes;
    for (int j = 0; j < code.proto.m; ++j) t.cn_updates[j] += r.cn_updates[j];
  }
  return t;
}

}  // namespace

McResult run_campaign(const LiftedCode& code, const ChannelParams& ch,
                      const DecoderConfig& cfg, const McOptions& opts) {
  if (opts.block < 1 || opts.max_frames < 1)
    throw config_error("bad simulation limits");
  const int workers = std::max(1, opts.workers);
  Tally total;
  total.cn_updates.assign(code.proto.m, 0);

  int64_t next = 0;
  while (next < opts.max_frames &&
         total.frame_errors < opts.target_frame_errors) {
    const int64_t count =
        std::min<int64_t>(opts.block, opts.max_frames - next);
    if (workers == 1) {
      total.add(run_frames(code, ch, cfg, opts.seed, next, count, 1));
    } else {
      std::vector<Tally> parts(workers);
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
          parts[w] = run_frames(code, ch, cfg, opts.seed, next + w,
                                count - w, workers);
        });
      for (auto& th : pool) th.join();
      for (const Tally& p : parts) total.add(p);
    }
    next += count;
  }

  McResult res;
  res.frames = total.frames;
  res.frame_errors = total.frame_errors;
  res.bit_errors = total.bit_errors;
  res.iters_total = total.iters_total;
  res.converged_frames = total.converged;
  res.n_bits = code.N;
  const DegreeProfile deg = code.proto.degrees();
  double cn_bits = 0.0;
  for (int j = 0; j < code.proto.m; ++j)
    cn_bits += static_cast<double>(total.cn_updates[j]) *
               (2 * cfg.q + deg.d_c[j] - 2);
  res.bits_written =
      static_cast<double>(total.beta_writes) * (cfg.q + deg.q_s) +
      (static_cast<double>(code.proto.m) / code.proto.n) * cn_bits;
  return res;
}

}  // namespace fqms
