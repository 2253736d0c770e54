#pragma once

// Shared helpers for the unit and acceptance tests: small graph builders,
// a floating-point reference decoder, and filesystem scratch space.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <unistd.h>
#include <vector>

#include "fqms/channel.hpp"
#include "fqms/decoder.hpp"
#include "fqms/protograph.hpp"
#include "fqms/rng.hpp"

namespace testsup {

// Builds a protograph directly (bypassing the parser's rate>0 check) so
// degenerate all-check graphs can be used as decoder fixtures.
inline fqms::Protograph make_proto(int m, int n, std::vector<int> s,
                                   std::string name = "fixture") {
  fqms::Protograph p;
  p.m = m;
  p.n = n;
  p.s = std::move(s);
  p.name = std::move(name);
  return p;
}

// Unique scratch directory under the system temp root, removed on
// destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<uint64_t> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Floating-point offset Min-Sum reference: same dataflow as the quantized
// decoder (posterior/message memories, layered or flooding, syndrome stop)
// but real-valued messages and no saturation.  Used as an independent
// behavioral oracle: with a fine quantizer the integer decoder should agree
// with this on almost every frame.
struct RefResult {
  std::vector<uint8_t> hard;
  bool converged = false;
  int iters = 0;
};

inline RefResult ref_decode(const std::vector<double>& y,
                            const fqms::LiftedCode& code,
                            const fqms::ChannelParams& ch, int lambda,
                            int max_iters, bool layered = true) {
  const int n_vars = code.N;
  const double sigma2 = ch.sigma2();
  std::vector<double> beta(n_vars);
  for (int v = 0; v < n_vars; ++v)
    beta[v] = fqms::llr(y[v], sigma2, ch.alpha);
  std::vector<double> gamma(code.cn_vn.size(), 0.0);

  auto process = [&](int c) {
    const int begin = code.cn_offset[c];
    const int d = code.cn_offset[c + 1] - begin;
    static thread_local std::vector<double> in;
    in.assign(d, 0.0);
    double min1 = 1e300, min2 = 1e300;
    int min_pos = -1;
    unsigned sign_all = 0;
    for (int k = 0; k < d; ++k) {
      const int e = begin + k;
      const double v = beta[code.cn_vn[e]] - gamma[e];
      in[k] = v;
      const double mag = std::fabs(v);
      if (mag < min1) {
        min2 = min1;
        min1 = mag;
        min_pos = k;
      } else if (mag < min2) {
        min2 = mag;
      }
      sign_all ^= static_cast<unsigned>(v < 0.0);
    }
    for (int k = 0; k < d; ++k) {
      const int e = begin + k;
      double mag = (k == min_pos) ? min2 : min1;
      mag = std::max(mag - lambda, 0.0);
      const unsigned neg = sign_all ^ static_cast<unsigned>(in[k] < 0.0);
      const double out = neg ? -mag : mag;
      beta[code.cn_vn[e]] += out - gamma[e];
      gamma[e] = out;
    }
  };

  auto syndrome_ok = [&]() {
    for (int c = 0; c < code.M; ++c) {
      unsigned par = 0;
      for (int e = code.cn_offset[c]; e < code.cn_offset[c + 1]; ++e)
        par ^= static_cast<unsigned>(beta[code.cn_vn[e]] < 0.0);
      if (par) return false;
    }
    return true;
  };

  RefResult r;
  for (int it = 0; it < max_iters; ++it) {
    if (layered) {
      for (int c = 0; c < code.M; ++c) process(c);
    } else {
      // Flooding: stage all updates on the old state.
      std::vector<double> beta_old = beta;
      std::vector<double> gnew(gamma.size());
      for (int c = 0; c < code.M; ++c) {
        const int begin = code.cn_offset[c];
        const int d = code.cn_offset[c + 1] - begin;
        std::vector<double> in(d);
        double min1 = 1e300, min2 = 1e300;
        int min_pos = -1;
        unsigned sign_all = 0;
        for (int k = 0; k < d; ++k) {
          const int e = begin + k;
          const double v = beta_old[code.cn_vn[e]] - gamma[e];
          in[k] = v;
          const double mag = std::fabs(v);
          if (mag < min1) {
            min2 = min1;
            min1 = mag;
            min_pos = k;
          } else if (mag < min2) {
            min2 = mag;
          }
          sign_all ^= static_cast<unsigned>(v < 0.0);
        }
        for (int k = 0; k < d; ++k) {
          double mag = (k == min_pos) ? min2 : min1;
          mag = std::max(mag - lambda, 0.0);
          const unsigned neg =
              sign_all ^ static_cast<unsigned>(in[k] < 0.0);
          gnew[begin + k] = neg ? -mag : mag;
        }
      }
      for (int c = 0; c < code.M; ++c)
        for (int e = code.cn_offset[c]; e < code.cn_offset[c + 1]; ++e) {
          beta[code.cn_vn[e]] += gnew[e] - gamma[e];
          gamma[e] = gnew[e];
        }
    }
    ++r.iters;
    if (syndrome_ok()) {
      r.converged = true;
      break;
    }
  }
  r.hard.resize(n_vars);
  for (int v = 0; v < n_vars; ++v) r.hard[v] = beta[v] < 0.0 ? 1 : 0;
  return r;
}

// AWGN frame for the all-zero codeword using the campaign's channel stream.
inline std::vector<double> make_frame(const fqms::LiftedCode& code,
                                      const fqms::ChannelParams& ch,
                                      uint64_t seed, uint64_t frame) {
  fqms::SplitMix64 rng =
      fqms::frame_stream(seed, frame, fqms::kMemChannel);
  const double sigma = std::sqrt(ch.sigma2());
  std::vector<double> y(code.N);
  for (int i = 0; i < code.N; ++i) y[i] = 1.0 + sigma * rng.next_gauss();
  return y;
}

}  // namespace testsup
