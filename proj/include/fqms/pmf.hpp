#pragma once

#include <cstddef>
#include <vector>

namespace fqms {

// Probability mass function over a contiguous integer value range
// [lo, lo + size - 1].  Kept as a plain offset + dense vector; the decoder
// and density-evolution inner loops index it directly.
struct ValuePmf {
  int lo = 0;
  std::vector<double> p;

  ValuePmf() = default;
  ValuePmf(int lo_, std::size_t n) : lo(lo_), p(n, 0.0) {}

  int hi() const { return lo + static_cast<int>(p.size()) - 1; }
  std::size_t size() const { return p.size(); }

  double at(int v) const {
    int k = v - lo;
    if (k < 0 || k >= static_cast<int>(p.size())) return 0.0;
    return p[static_cast<std::size_t>(k)];
  }
  double& ref(int v) { return p[static_cast<std::size_t>(v - lo)]; }

  double sum() const {
    double s = 0.0;
    for (double x : p) s += x;
    return s;
  }

  // P(value < 0) + 0.5 P(value = 0): the hard-decision error probability
  // under the sign(0) = +1 convention with symmetric tie counting.
  double error_prob() const {
    double s = 0.0;
    int top = std::min(-1, hi());
    for (int v = lo; v <= top; ++v) s += p[static_cast<std::size_t>(v - lo)];
    return s + 0.5 * at(0);
  }

  // Clamp tiny negative masses from floating error and renormalize.
  // Returns the worst negative excursion seen (>= 0).
  double cleanup();
};

// Pmf over {-Q..Q} with unit mass at value v.
ValuePmf unit_pmf(int v, int Q);

}  // namespace fqms
