#include "fqms/fault.hpp"

#include <algorithm>
#include <cmath>

#include "fqms/channel.hpp"
#include "fqms/common.hpp"

namespace fqms {

FaultChannel::FaultChannel(int width_, double eps_) : width(width_), eps(eps_) {
  if (width < 1 || width > 20) throw config_error("fault channel width out of range");
  if (!(eps >= 0.0) || eps > 1.0) throw config_error("epsilon must lie in [0,1]");
  if (eps == 0.0) return;
  const int npat = 1 << width;
  cum_.resize(npat);
  double acc = 0.0;
  for (int mask = 0; mask < npat; ++mask) {
    int h = __builtin_popcount(static_cast<unsigned>(mask));
    acc += std::pow(eps, h) * std::pow(1.0 - eps, width - h);
    cum_[mask] = acc;
  }
  cum_.back() = 1.0;  // guard against accumulated round-off
  p_clean_ = std::pow(1.0 - eps, width);
}

int FaultChannel::draw_mask(double u) const {
  auto it = std::lower_bound(cum_.begin(), cum_.end(), u);
  if (it == cum_.end()) --it;
  return static_cast<int>(it - cum_.begin());
}

void FaultOperator::apply(ValuePmf& f) const {
  if (eps == 0.0) return;
  const int Q = msg_max(q);
  const int npat = 1 << q;
  std::vector<double> buf(static_cast<std::size_t>(npat), 0.0);
  for (int v = -Q; v <= Q; ++v) buf[static_cast<std::size_t>(sm_encode(v, q))] = f.at(v);

  // Independent per-bit mixing: one in-place butterfly pass per bit.
  const double a = 1.0 - eps, b = eps;
  for (int bit = 0; bit < q; ++bit) {
    const int stride = 1 << bit;
    for (int base = 0; base < npat; base += 2 * stride)
      for (int k = base; k < base + stride; ++k) {
        double x = buf[static_cast<std::size_t>(k)];
        double y = buf[static_cast<std::size_t>(k + stride)];
        buf[static_cast<std::size_t>(k)] = a * x + b * y;
        buf[static_cast<std::size_t>(k + stride)] = a * y + b * x;
      }
  }

  ValuePmf out(-Q, static_cast<std::size_t>(2 * Q + 1));
  for (int pat = 0; pat < npat; ++pat) out.ref(sm_decode(pat, q)) += buf[static_cast<std::size_t>(pat)];
  f = std::move(out);
}

std::vector<double> FaultOperator::matrix() const {
  const int Q = msg_max(q);
  const int A = 2 * Q + 1;
  std::vector<double> T(static_cast<std::size_t>(A) * A, 0.0);
  for (int v = -Q; v <= Q; ++v) {
    ValuePmf row = unit_pmf(v, Q);
    apply(row);
    for (int w = -Q; w <= Q; ++w)
      T[static_cast<std::size_t>(v + Q) * A + (w + Q)] = row.at(w);
  }
  return T;
}

}  // namespace fqms
