#include "fqms/pmf.hpp"

#include <algorithm>
#include <cmath>

#include "fqms/common.hpp"

namespace fqms {

double ValuePmf::cleanup() {
  double worst = 0.0;
  for (double& x : p) {
    if (x < 0.0) {
      worst = std::max(worst, -x);
      x = 0.0;
    }
  }
  if (worst > 1e-10) warn("pmf had negative mass " + std::to_string(worst));
  double s = sum();
  if (s > 0.0 && s != 1.0) {
    double inv = 1.0 / s;
    for (double& x : p) x *= inv;
  }
  if (std::abs(s - 1.0) > 1e-10) warn("pmf mass drifted to " + std::to_string(s));
  return worst;
}

ValuePmf unit_pmf(int v, int Q) {
  ValuePmf f(-Q, static_cast<std::size_t>(2 * Q + 1));
  f.ref(v) = 1.0;
  return f;
}

}  // namespace fqms
