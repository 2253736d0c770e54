#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fqms/channel.hpp"
#include "fqms/common.hpp"

using namespace fqms;

TEST_CASE("alphabet bounds") {
  CHECK(msg_max(3) == 3);
  CHECK(msg_max(5) == 15);
  CHECK(msg_max(8) == 127);
  CHECK(acc_max(5, 3) == 127);
  CHECK(acc_max(3, 1) == 7);
}

TEST_CASE("midpoint quantizer with saturation") {
  CHECK(quantize(0.5, 5) == 1);    // half-integers round up in magnitude
  CHECK(quantize(-0.5, 5) == -1);
  CHECK(quantize(2.49, 5) == 2);
  CHECK(quantize(2.5, 5) == 3);
  CHECK(quantize(-2.5, 5) == -3);
  CHECK(quantize(7.3, 3) == 3);    // saturates at Q=3
  CHECK(quantize(-9.0, 3) == -3);
  CHECK(quantize(0.0, 5) == 0);
  CHECK(quantize(-0.2, 5) == 0);   // sign of zero is +
  CHECK(quantize(15.4, 5) == 15);
  CHECK(quantize(1e9, 8) == 127);
}

TEST_CASE("scaled llr and channel parameters") {
  ChannelParams ch{.snr_db = 0.0, .alpha = 1.0};
  CHECK(ch.sigma2() == doctest::Approx(1.0));
  CHECK(ch.snr_linear() == doctest::Approx(1.0));
  CHECK(llr(1.0, 1.0, 1.0) == doctest::Approx(2.0));
  CHECK(llr(-0.5, 2.0, 0.8) == doctest::Approx(-0.4));
  ChannelParams ch3{.snr_db = 3.0, .alpha = 1.0};
  CHECK(ch3.snr_linear() == doctest::Approx(std::pow(10.0, 0.3)));
  CHECK(ch3.sigma2() == doctest::Approx(std::pow(10.0, -0.3)));
}

TEST_CASE("crossover probability and its inverses") {
  // p0(xi) = Phi(-sqrt(xi)); at 1.45 dB the linear SNR is 1.39637,
  // sqrt = 1.18168, so p0 = Phi(-1.18168) = 0.11866 (reference: tables).
  const double p0 = p0_of_snr_db(1.45);
  CHECK(p0 > 0.1183);
  CHECK(p0 < 0.1191);
  CHECK(snr_db_of_p0(p0) == doctest::Approx(1.45).epsilon(1e-9));
  for (double db : {-2.0, 0.0, 1.45, 4.0, 8.0})
    CHECK(snr_db_of_p0(p0_of_snr_db(db)) == doctest::Approx(db).epsilon(1e-9));

  // The linear-SNR inverse is the squared probit of the complement.
  const double xi = snr_linear_of_p0(0.05);
  CHECK(std::sqrt(xi) == doctest::Approx(1.6448536269514722).epsilon(1e-9));
  CHECK(p0_of_snr_db(10.0 * std::log10(xi)) == doctest::Approx(0.05).epsilon(1e-9));

  CHECK_THROWS_AS(snr_db_of_p0(0.0), config_error);
  CHECK_THROWS_AS(snr_db_of_p0(0.5), config_error);
  CHECK_THROWS_AS(snr_db_of_p0(-0.1), config_error);
  CHECK_THROWS_AS(snr_db_of_p0(0.7), config_error);
}

TEST_CASE("quantized channel llr distribution") {
  // Hand check: q=3, 2 dB, alpha=0.8.  The scaled LLR is Gaussian with mean
  // 2*alpha/sigma2 and variance 4*alpha^2/sigma2; interior mass at 0 is
  // Phi((0.5-mu)/sl) - Phi((-0.5-mu)/sl) with mu=2.53582, sl=2.01428, which
  // evaluates to 0.0902 (checked offline against normal tables).
  const ChannelParams ch{.snr_db = 2.0, .alpha = 0.8};
  const ValuePmf f = channel_pmf(3, ch);
  CHECK(f.lo == -3);
  CHECK(f.hi() == 3);
  CHECK(f.sum() == doctest::Approx(1.0).epsilon(1e-12));

  const double sigma2 = ch.sigma2();
  const double mu = 2.0 * ch.alpha / sigma2;
  const double sl = std::sqrt(4.0 * ch.alpha * ch.alpha / sigma2);
  auto cdf = [&](double x) { return 0.5 * std::erfc(-(x - mu) / (sl * std::sqrt(2.0))); };
  for (int k = -2; k <= 2; ++k)
    CHECK(f.at(k) == doctest::Approx(cdf(k + 0.5) - cdf(k - 0.5)).epsilon(1e-12));
  CHECK(f.at(3) == doctest::Approx(1.0 - cdf(2.5)).epsilon(1e-12));
  CHECK(f.at(-3) == doctest::Approx(cdf(-2.5)).epsilon(1e-10));
  CHECK(f.at(0) == doctest::Approx(0.09023).epsilon(2e-3));

  // Positive mean under the all-(+1) convention.
  double mean = 0.0;
  for (int k = -3; k <= 3; ++k) mean += k * f.at(k);
  CHECK(mean > 0.0);

  // alpha = 0 collapses everything onto zero.
  const ValuePmf z = channel_pmf(3, ChannelParams{.snr_db = 2.0, .alpha = 0.0});
  CHECK(z.at(0) == doctest::Approx(1.0));
}
