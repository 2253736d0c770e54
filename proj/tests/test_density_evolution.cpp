#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "fqms/channel.hpp"
#include "fqms/common.hpp"
#include "fqms/density_evolution.hpp"
#include "fqms/pmf.hpp"
#include "fqms/rng.hpp"
#include "support.hpp"

using namespace fqms;

namespace {

// ---- self-contained dense-pmf toolkit for enumeration oracles (Q = 3) ----

constexpr int kQ = 3;
using Dense = std::array<double, 2 * kQ + 1>;  // index v + kQ

Dense from_pmf(const ValuePmf& f) {
  Dense d{};
  for (int v = -kQ; v <= kQ; ++v) d[v + kQ] = f.at(v);
  return d;
}

int cn_op(int u, int v) {
  if (u == 0 || v == 0) return 0;
  int mag = std::min(std::abs(u), std::abs(v));
  return ((u < 0) != (v < 0)) ? -mag : mag;
}

int offset_op(int v, int lambda) {
  int mag = std::abs(v) - lambda;
  if (mag < 0) mag = 0;
  return v < 0 ? -mag : mag;
}

// Bit-level read-noise transition matrix by direct pattern enumeration,
// written independently of the library operator.
std::array<std::array<double, 7>, 7> fault_matrix(double eps) {
  std::array<std::array<double, 7>, 7> T{};
  auto enc = [](int v) { return v < 0 ? (4 | -v) : v; };
  auto dec = [](int p) { int m = p & 3; return (p & 4) ? -m : m; };
  for (int v = -3; v <= 3; ++v)
    for (int mask = 0; mask < 8; ++mask) {
      double p = 1.0;
      for (int b = 0; b < 3; ++b) p *= (mask >> b & 1) ? eps : 1.0 - eps;
      T[v + 3][dec(enc(v) ^ mask) + 3] += p;
    }
  return T;
}

// Check-node extrinsic law for two inputs, then offset, then read noise.
Dense extrinsic2(const Dense& a, const Dense& b, int lambda, double eps) {
  Dense pre{};
  for (int u = -kQ; u <= kQ; ++u)
    for (int v = -kQ; v <= kQ; ++v)
      pre[offset_op(cn_op(u, v), lambda) + kQ] += a[u + kQ] * b[v + kQ];
  auto T = fault_matrix(eps);
  Dense out{};
  for (int t = -kQ; t <= kQ; ++t)
    for (int w = -kQ; w <= kQ; ++w) out[w + kQ] += pre[t + kQ] * T[t + kQ][w + kQ];
  return out;
}

// Error probability of a sum of independent dense laws (sign of the total).
double err_sum2(const Dense& a, const Dense& b) {
  double e = 0.0;
  for (int x = -kQ; x <= kQ; ++x)
    for (int y = -kQ; y <= kQ; ++y) {
      const double p = a[x + kQ] * b[y + kQ];
      const int s = x + y;
      e += s < 0 ? p : (s == 0 ? 0.5 * p : 0.0);
    }
  return e;
}

double err_sum3(const Dense& a, const Dense& b, const Dense& c) {
  double e = 0.0;
  for (int x = -kQ; x <= kQ; ++x)
    for (int y = -kQ; y <= kQ; ++y)
      for (int z = -kQ; z <= kQ; ++z) {
        const double p = a[x + kQ] * b[y + kQ] * c[z + kQ];
        const int s = x + y + z;
        e += s < 0 ? p : (s == 0 ? 0.5 * p : 0.0);
      }
  return e;
}

double err1(const Dense& a) {
  double e = 0.5 * a[kQ];
  for (int x = -kQ; x < 0; ++x) e += a[x + kQ];
  return e;
}

// ---- wide variants for on-the-fly sums that exceed the stored range ----
// A Wide law lives on [-W, W] with index v + W, W = (size - 1) / 2.

using Wide = std::vector<double>;

int wbound(const Wide& a) { return (static_cast<int>(a.size()) - 1) / 2; }

Wide widen(const Dense& a) { return Wide(a.begin(), a.end()); }

// Exact sum of two independent laws, no folding: support grows to Wa + Wb.
Wide wconv(const Wide& a, const Wide& b) {
  const int Wa = wbound(a), Wb = wbound(b);
  Wide out(2 * static_cast<size_t>(Wa + Wb) + 1, 0.0);
  for (int x = -Wa; x <= Wa; ++x)
    for (int y = -Wb; y <= Wb; ++y)
      out[static_cast<size_t>(x + y + Wa + Wb)] += a[x + Wa] * b[y + Wb];
  return out;
}

// Offset then write-back saturation onto the stored [-kQ, kQ] alphabet.
int store_op(int v, int lambda) {
  int mag = std::abs(v) - lambda;
  if (mag < 0) mag = 0;
  if (mag > kQ) mag = kQ;
  return v < 0 ? -mag : mag;
}

// Check-node extrinsic law for two wide inputs: min-sign law at full width,
// offset, saturation to the stored range, then read noise.
Dense wextr2(const Wide& a, const Wide& b, int lambda, double eps) {
  const int Wa = wbound(a), Wb = wbound(b);
  Dense pre{};
  for (int u = -Wa; u <= Wa; ++u)
    for (int v = -Wb; v <= Wb; ++v)
      pre[store_op(cn_op(u, v), lambda) + kQ] += a[u + Wa] * b[v + Wb];
  auto T = fault_matrix(eps);
  Dense out{};
  for (int t = -kQ; t <= kQ; ++t)
    for (int w = -kQ; w <= kQ; ++w) out[w + kQ] += pre[t + kQ] * T[t + kQ][w + kQ];
  return out;
}

ValuePmf random_pmf(int Q, SplitMix64& rng) {
  ValuePmf f(-Q, 2 * Q + 1);
  double s = 0.0;
  for (auto& v : f.p) s += (v = rng.next_double());
  for (auto& v : f.p) v /= s;
  return f;
}

}  // namespace

TEST_CASE("pairwise check-node law matches brute-force enumeration") {
  SplitMix64 rng(31);
  const int Q = 7;
  for (int trial = 0; trial < 8; ++trial) {
    ValuePmf a = random_pmf(Q, rng), b = random_pmf(Q, rng);
    ValuePmf got = cn_pair(a, b);
    std::vector<double> want(2 * Q + 1, 0.0);
    for (int u = -Q; u <= Q; ++u)
      for (int v = -Q; v <= Q; ++v) want[cn_op(u, v) + Q] += a.at(u) * b.at(v);
    REQUIRE(got.lo == -Q);
    REQUIRE(static_cast<int>(got.size()) == 2 * Q + 1);
    for (int w = -Q; w <= Q; ++w)
      CHECK(got.at(w) == doctest::Approx(want[w + Q]).epsilon(1e-13));
    CHECK(got.sum() == doctest::Approx(1.0).epsilon(1e-12));
  }

  // Unit at +Q is the neutral element; zero absorbs.
  ValuePmf x = random_pmf(Q, rng);
  ValuePmf nx = cn_pair(unit_pmf(Q, Q), x);
  for (int w = -Q; w <= Q; ++w)
    CHECK(nx.at(w) == doctest::Approx(x.at(w)).epsilon(1e-14));
  ValuePmf zx = cn_pair(unit_pmf(0, Q), x);
  CHECK(zx.at(0) == doctest::Approx(1.0));

  // Associativity of the chained law.
  ValuePmf c = random_pmf(Q, rng);
  ValuePmf ab_c = cn_pair(cn_pair(x, c), nx);
  ValuePmf a_bc = cn_pair(x, cn_pair(c, nx));
  for (int w = -Q; w <= Q; ++w)
    CHECK(ab_c.at(w) == doctest::Approx(a_bc.at(w)).epsilon(1e-12));

  // Mixed widths: a wide input against a narrow one lands on the narrow
  // range and still matches enumeration bin for bin.
  ValuePmf wv = random_pmf(2 * Q, rng);
  ValuePmf mixed = cn_pair(wv, x);
  REQUIRE(mixed.lo == -Q);
  REQUIRE(static_cast<int>(mixed.size()) == 2 * Q + 1);
  std::vector<double> want_m(2 * Q + 1, 0.0);
  for (int u = -2 * Q; u <= 2 * Q; ++u)
    for (int v = -Q; v <= Q; ++v)
      want_m[cn_op(u, v) + Q] += wv.at(u) * x.at(v);
  for (int w = -Q; w <= Q; ++w)
    CHECK(mixed.at(w) == doctest::Approx(want_m[w + Q]).epsilon(1e-13));
  CHECK(mixed.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("offset shrinks magnitudes toward zero") {
  SplitMix64 rng(32);
  const int Q = 7;
  ValuePmf f = random_pmf(Q, rng);

  ValuePmf id = apply_offset(f, 0, Q);
  for (int w = -Q; w <= Q; ++w)
    CHECK(id.at(w) == doctest::Approx(f.at(w)).epsilon(1e-15));

  const int lambda = 2;
  ValuePmf g = apply_offset(f, lambda, Q);
  for (int w = -Q; w <= Q; ++w) {
    double want = 0.0;
    for (int v = -Q; v <= Q; ++v)
      if (offset_op(v, lambda) == w) want += f.at(v);
    CHECK(g.at(w) == doctest::Approx(want).epsilon(1e-14));
  }
  CHECK(g.sum() == doctest::Approx(1.0).epsilon(1e-12));

  // A wide input shrinks by lambda first, then saturates to the stored
  // range; mass beyond the rails piles up on +-Q.
  const int Wf = 2 * Q + 3;
  ValuePmf wf = random_pmf(Wf, rng);
  ValuePmf ws = apply_offset(wf, lambda, Q);
  REQUIRE(ws.lo == -Q);
  for (int w = -Q; w <= Q; ++w) {
    double want = 0.0;
    for (int v = -Wf; v <= Wf; ++v)
      if (std::clamp(offset_op(v, lambda), -Q, Q) == w) want += wf.at(v);
    CHECK(ws.at(w) == doctest::Approx(want).epsilon(1e-14));
  }
  CHECK(ws.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("point masses through the three-input extrinsic rule") {
  // Inputs +5, -3, +7 with offset 1: each extrinsic output is the signed
  // min of the other two, shrunk by one.
  const int Q = 7;
  ValuePmf a = unit_pmf(5, Q), b = unit_pmf(-3, Q), c = unit_pmf(7, Q);
  ValuePmf e0 = apply_offset(cn_pair(b, c), 1, Q);
  ValuePmf e1 = apply_offset(cn_pair(a, c), 1, Q);
  ValuePmf e2 = apply_offset(cn_pair(a, b), 1, Q);
  CHECK(e0.at(-2) == doctest::Approx(1.0));
  CHECK(e1.at(4) == doctest::Approx(1.0));
  CHECK(e2.at(-2) == doctest::Approx(1.0));
}

TEST_CASE("one evolution step matches full enumeration") {
  // Single check over three degree-1 variables: every quantity is a sum
  // over at most three 7-point alphabets, done here longhand.
  const Protograph proto = testsup::make_proto(1, 3, {1, 1, 1});
  struct Params {
    double snr_db, alpha, eps;
    int lambda;
  };
  for (const Params& P : {Params{1.0, 0.9, 0.07, 1}, Params{2.0, 1.0, 0.0, 0}}) {
    CAPTURE(P.snr_db);
    CAPTURE(P.eps);
    DeConfig cfg;
    cfg.q = 3;
    cfg.alpha = P.alpha;
    cfg.lambda = P.lambda;
    cfg.eps = P.eps;
    cfg.flood_iters = 1;
    DeTrace trace = de_run(proto, cfg, P.snr_db);
    REQUIRE(trace.pe.size() == 2);

    const Dense c = from_pmf(channel_pmf(3, ChannelParams{P.snr_db, P.alpha}));
    CHECK(trace.pe[0] == doctest::Approx(err1(c)).epsilon(1e-12));

    // All three edges carry the channel law, so each extrinsic is the
    // noisy offset min-sign of two independent channel draws, and the
    // posterior adds one more channel draw.
    const Dense w = extrinsic2(c, c, P.lambda, P.eps);
    const double pe1 = err_sum2(c, w);
    CHECK(trace.pe[1] == doctest::Approx(pe1).epsilon(1e-12));
  }
}

TEST_CASE("parallel edges evolve as independent instances") {
  // Multiplicity-2 column: the check sees three message instances (two
  // copies from column 0, one from column 1), and column 0 accumulates two
  // independent extrinsic draws.
  const Protograph proto = testsup::make_proto(1, 2, {2, 1});
  DeConfig cfg;
  cfg.q = 3;
  cfg.alpha = 0.9;
  cfg.lambda = 1;
  cfg.eps = 0.07;
  cfg.flood_iters = 2;
  const double snr_db = 1.0;
  DeTrace trace = de_run(proto, cfg, snr_db);
  REQUIRE(trace.pe.size() == 3);

  const Dense c = from_pmf(channel_pmf(3, ChannelParams{snr_db, cfg.alpha}));
  CHECK(trace.pe[0] == doctest::Approx(err1(c)).epsilon(1e-12));

  // Iteration 1: all three instances start from the channel law.
  const Dense w1 = extrinsic2(c, c, cfg.lambda, cfg.eps);
  const double pe1 = 0.5 * (err_sum3(c, w1, w1) + err_sum2(c, w1));
  CHECK(trace.pe[1] == doctest::Approx(pe1).epsilon(1e-12));

  // Iteration 2: each parallel copy's return message adds the channel to
  // its sibling's stored input at full accumulator width (support +-6, no
  // folding); column 1 keeps sending the bare channel law.  The check
  // output saturates back to the stored range only at write-back, which
  // bites on the column-1 edge where both inputs are wide.
  const Wide e00 = wconv(widen(c), widen(w1));
  const Dense w2_copy = wextr2(e00, widen(c), cfg.lambda, cfg.eps);
  const Dense w2_01 = wextr2(e00, e00, cfg.lambda, cfg.eps);
  const double pe2 =
      0.5 * (err_sum3(c, w2_copy, w2_copy) + err_sum2(c, w2_01));
  CHECK(trace.pe[2] == doctest::Approx(pe2).epsilon(1e-12));
}

TEST_CASE("trace shape, early exit, and monotone clean decay") {
  DeConfig cfg;
  cfg.q = 5;
  cfg.alpha = 1.0;
  cfg.flood_iters = 60;
  DeTrace trace = de_run(protograph_preset("s17"), cfg, 4.0);
  REQUIRE(trace.pe.size() == 61);
  CHECK(trace.iters_run < 60);  // well above threshold: converges early
  CHECK(trace.pe.back() < 1e-10);
  for (size_t l = 1; l < trace.pe.size(); ++l)
    CHECK(trace.pe[l] <= trace.pe[l - 1] + 1e-15);
  for (int l = trace.iters_run; l <= 60; ++l)
    CHECK(trace.pe[l] == trace.pe[trace.iters_run]);
}

TEST_CASE("entering by crossover probability matches entering by snr") {
  DeConfig cfg;
  cfg.q = 4;
  cfg.flood_iters = 20;
  const Protograph proto = protograph_preset("s36");
  DeTrace by_snr = de_run(proto, cfg, 2.0);
  DeTrace by_p0 = de_run_at_p0(proto, cfg, p0_of_snr_db(2.0));
  REQUIRE(by_snr.pe.size() == by_p0.pe.size());
  for (size_t l = 0; l < by_snr.pe.size(); ++l)
    CHECK(by_p0.pe[l] == doctest::Approx(by_snr.pe[l]).epsilon(1e-9));
}

TEST_CASE("read noise lifts the fixed point") {
  DeConfig clean;
  clean.q = 5;
  clean.alpha = 1.0;
  clean.flood_iters = 80;
  DeConfig noisy = clean;
  noisy.eps = 1e-3;
  const Protograph proto = protograph_preset("s17");
  const double pe_clean = de_run(proto, clean, 3.0).pe.back();
  const double pe_noisy = de_run(proto, noisy, 3.0).pe.back();
  CHECK(pe_clean < 1e-10);
  CHECK(pe_noisy > 1e-5);
  CHECK(pe_noisy < 0.5);
}

TEST_CASE("smallest workable snr by bisection") {
  DeConfig cfg;
  cfg.q = 5;
  cfg.alpha = 1.0;
  cfg.flood_iters = 100;
  const Protograph proto = protograph_preset("s17");
  const double t = de_threshold(proto, cfg, 1e-6, 0.5, 3.0, 0.01);
  CHECK(t > 0.5);
  CHECK(t < 3.0);
  // The returned point works; a clearly smaller snr does not.
  CHECK(de_run(proto, cfg, t).pe.back() <= 1e-6);
  CHECK(de_run(proto, cfg, t - 0.2).pe.back() > 1e-6);

  // A strong persistent fault floor makes tiny targets unreachable at any
  // snr in the bracket.
  DeConfig faulty = cfg;
  faulty.eps = 0.05;
  CHECK_THROWS_AS(de_threshold(proto, faulty, 1e-9, 0.5, 3.0, 0.01),
                  infeasible_error);
}
