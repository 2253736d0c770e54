#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "fqms/conv.hpp"
#include "fqms/pmf.hpp"
#include "fqms/rng.hpp"

using namespace fqms;

namespace {

ValuePmf random_pmf(int lo, int n, SplitMix64& rng) {
  ValuePmf f(lo, n);
  double s = 0.0;
  for (auto& v : f.p) {
    v = rng.next_double();
    s += v;
  }
  for (auto& v : f.p) v /= s;
  return f;
}

// O(n^2) convolution oracle, written independently of the library code.
ValuePmf conv_oracle(const ValuePmf& a, const ValuePmf& b) {
  ValuePmf out(a.lo + b.lo, a.size() + b.size() - 1);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) out.p[i + j] += a.p[i] * b.p[j];
  return out;
}

double max_abs_diff(const ValuePmf& a, const ValuePmf& b) {
  REQUIRE(a.lo == b.lo);
  REQUIRE(a.size() == b.size());
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::fabs(a.p[i] - b.p[i]));
  return m;
}

}  // namespace

TEST_CASE("pmf basics: bounds, lookup, error probability") {
  ValuePmf u0 = unit_pmf(0, 3);
  CHECK(u0.lo == -3);
  CHECK(u0.hi() == 3);
  CHECK(u0.at(0) == 1.0);
  CHECK(u0.at(5) == 0.0);  // out of range reads as zero
  CHECK(u0.error_prob() == doctest::Approx(0.5));
  CHECK(unit_pmf(-2, 3).error_prob() == doctest::Approx(1.0));
  CHECK(unit_pmf(2, 3).error_prob() == doctest::Approx(0.0));

  ValuePmf f(-1, 3);
  f.ref(-1) = 0.25;
  f.ref(0) = 0.5;
  f.ref(1) = 0.25;
  CHECK(f.error_prob() == doctest::Approx(0.5));
  CHECK(f.sum() == doctest::Approx(1.0));
}

TEST_CASE("cleanup clamps floating noise and renormalizes") {
  ValuePmf f(-1, 3);
  f.ref(-1) = -1e-13;
  f.ref(0) = 0.6;
  f.ref(1) = 0.4;
  const double worst = f.cleanup();
  CHECK(worst == doctest::Approx(1e-13));
  CHECK(f.at(-1) == 0.0);
  CHECK(f.sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("direct convolution equals the quadratic oracle") {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    ValuePmf a = random_pmf(-3, 7, rng);
    ValuePmf b = random_pmf(-5, 11, rng);
    CHECK(max_abs_diff(conv_direct(a, b), conv_oracle(a, b)) < 1e-15);
  }
  // Delta convolution shifts.
  ValuePmf d = unit_pmf(2, 3);
  ValuePmf a = random_pmf(-3, 7, rng);
  ValuePmf shifted = conv_direct(a, d);
  CHECK(shifted.lo == a.lo + d.lo);
  for (int v = -3; v <= 3; ++v)
    CHECK(shifted.at(v + 2) == doctest::Approx(a.at(v)).epsilon(1e-15));
}

TEST_CASE("fft convolution agrees with direct to 1e-13") {
  SplitMix64 rng(6);
  for (auto [na, nb] : {std::pair{64, 129}, {255, 255}, {31, 400}}) {
    ValuePmf a = random_pmf(-na / 2, na, rng);
    ValuePmf b = random_pmf(-nb / 2, nb, rng);
    const ValuePmf d = conv_direct(a, b);
    const ValuePmf f = conv_fft(a, b);
    CHECK(max_abs_diff(d, f) < 1e-13);
    const ValuePmf auto_c = conv_auto(a, b);
    CHECK(max_abs_diff(d, auto_c) < 1e-13);
  }
}

TEST_CASE("saturation folds tail mass onto the boundaries") {
  SplitMix64 rng(7);
  ValuePmf a = random_pmf(-6, 13, rng);
  const double total = a.sum();
  double below = 0.0, above = 0.0;
  for (int v = -6; v < -2; ++v) below += a.at(v);
  for (int v = 3; v <= 6; ++v) above += a.at(v);
  const double at_lo = a.at(-2), at_hi = a.at(2), at_0 = a.at(0);
  saturate_fold(a, 2);
  CHECK(a.lo == -2);
  CHECK(a.hi() == 2);
  CHECK(a.sum() == doctest::Approx(total).epsilon(1e-14));
  CHECK(a.at(-2) == doctest::Approx(at_lo + below).epsilon(1e-14));
  CHECK(a.at(2) == doctest::Approx(at_hi + above).epsilon(1e-14));
  CHECK(a.at(0) == doctest::Approx(at_0).epsilon(1e-15));

  // Folding a pmf already inside the range is a no-op.
  ValuePmf inside = random_pmf(-1, 3, rng);
  ValuePmf copy = inside;
  saturate_fold(inside, 4);
  CHECK(max_abs_diff(inside, copy) == 0.0);
}

TEST_CASE("variable-node combination matches leave-one-out oracles") {
  SplitMix64 rng(8);
  VnScratch scratch;

  auto check_case = [&](int q_msgs, int n_msgs, double tol) {
    ValuePmf ch = random_pmf(-q_msgs, 2 * q_msgs + 1, rng);
    std::vector<ValuePmf> msgs;
    std::vector<const ValuePmf*> ptrs;
    for (int k = 0; k < n_msgs; ++k)
      msgs.push_back(random_pmf(-q_msgs, 2 * q_msgs + 1, rng));
    for (auto& m : msgs) ptrs.push_back(&m);

    ValuePmf post;
    std::vector<ValuePmf> extr;
    vn_combine(ch, ptrs, post, extr, scratch);

    ValuePmf full = ch;
    for (const auto& m : msgs) full = conv_oracle(full, m);
    CHECK(max_abs_diff(post, full) < tol);
    REQUIRE(extr.size() == msgs.size());
    for (int k = 0; k < n_msgs; ++k) {
      ValuePmf loo = ch;
      for (int j = 0; j < n_msgs; ++j)
        if (j != k) loo = conv_oracle(loo, msgs[j]);
      CHECK(max_abs_diff(extr[k], loo) < tol);
    }
  };

  check_case(3, 4, 1e-14);    // small alphabet: direct path
  check_case(3, 1, 1e-14);    // single message edge case
  check_case(127, 5, 1e-11);  // large alphabet: shared-transform path

  // No incoming messages: the posterior is the channel itself.
  ValuePmf ch = random_pmf(-3, 7, rng);
  ValuePmf post;
  std::vector<ValuePmf> extr;
  vn_combine(ch, {}, post, extr, scratch);
  CHECK(max_abs_diff(post, ch) == 0.0);
  CHECK(extr.empty());
}
