#include "fqms/channel.hpp"

#include "fqms/common.hpp"
#include "fqms/special.hpp"

namespace fqms {

double p0_of_snr_db(double snr_db) {
  double xi = std::pow(10.0, snr_db / 10.0);
  return 0.5 - 0.5 * std::erf(std::sqrt(0.5 * xi));
}

double snr_linear_of_p0(double p0) {
  if (!(p0 > 0.0) || !(p0 < 0.5)) throw config_error("snr_of_p0: p0 must lie in (0, 1/2)");
  double z = probit(p0);  // = -sqrt(xi)
  return z * z;
}

double snr_db_of_p0(double p0) { return 10.0 * std::log10(snr_linear_of_p0(p0)); }

ValuePmf channel_pmf(int q, const ChannelParams& ch) {
  const int Q = msg_max(q);
  const double s2 = ch.sigma2();
  // LLR of y ~ N(+1, s2) is t ~ N(mu, st^2).
  const double mu = 2.0 * ch.alpha / s2;
  const double st = 2.0 * ch.alpha / std::sqrt(s2);
  ValuePmf f(-Q, static_cast<std::size_t>(2 * Q + 1));
  if (!(st > 0.0)) {  // alpha == 0 collapses every LLR to 0
    f.ref(0) = 1.0;
    return f;
  }
  auto cdf = [&](double t) { return norm_cdf((t - mu) / st); };
  double prev = 0.0;  // CDF at the lower edge of the current cell
  for (int k = -Q; k <= Q; ++k) {
    double upper = (k == Q) ? 1.0 : cdf(k + 0.5);
    f.ref(k) = upper - prev;
    prev = upper;
  }
  return f;
}

}  // namespace fqms
