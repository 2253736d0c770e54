#include "fqms/finite_length.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>

#include "fqms/channel.hpp"
#include "fqms/common.hpp"

namespace fqms {
namespace {

constexpr double kLogFloor = 1e-300;  // keeps log(pe) finite at pe = 0
constexpr double kRefineFloor = 1e-12;  // ignore sub-resolution wiggle

// Gauss-Legendre nodes/weights on [-1, 1], by Newton iteration on the
// Legendre recurrence.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
}

double gauss_density(double x, double mu, double s) {
  const double t = (x - mu) / s;
  return std::exp(-0.5 * t * t) / (s * std::sqrt(2.0 * M_PI));
}

double pchip_end_slope(double h0, double h1, double d0, double d1) {
  double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
  if (m * d0 <= 0.0) return 0.0;
  if ((d0 > 0.0) != (d1 > 0.0) && std::abs(m) > 3.0 * std::abs(d0))
    return 3.0 * d0;
  return m;
}

// Fritsch-Carlson monotonicity-preserving cubic slopes.
std::vector<double> pchip_slopes(const std::vector<double>& x,
                                 const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  std::vector<double> m(n, 0.0);
  if (n < 2) return m;
  std::vector<double> h(n - 1), d(n - 1);
  for (int i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    d[i] = (y[i + 1] - y[i]) / h[i];
  }
  if (n == 2) {
    m[0] = m[1] = d[0];
    return m;
  }
  for (int i = 1; i + 1 < n; ++i) {
    if (d[i - 1] == 0.0 || d[i] == 0.0 || (d[i - 1] > 0.0) != (d[i] > 0.0)) {
      m[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
    }
  }
  m[0] = pchip_end_slope(h[0], h[1], d[0], d[1]);
  m[n - 1] = pchip_end_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
  return m;
}

}  // namespace

IntegrationGrid build_grid(double snr_db, double n_bits, int points,
                           double k_sigma) {
  if (points < 1) throw config_error("integration grid needs >= 1 point");
  if (n_bits < 1.0) throw config_error("block length must be >= 1");
  IntegrationGrid g;
  g.p0 = p0_of_snr_db(snr_db);
  g.s = std::sqrt(g.p0 * (1.0 - g.p0) / n_bits);
  const double lo = std::max(1e-9, g.p0 - k_sigma * g.s);
  const double hi = std::min(0.5 - 1e-9, g.p0 + k_sigma * g.s);
  if (!(hi > lo)) {
    // Range fully clipped: everything sits at the nearest admissible point.
    g.x = {std::clamp(g.p0, 1e-9, 0.5 - 1e-9)};
    g.w = {1.0};
    return g;
  }
  const int panels = (points + 7) / 8;
  std::vector<double> gx, gw;
  for (int p = 0; p < panels; ++p) {
    const int count = (p + 1 < panels) ? 8 : points - 8 * (panels - 1);
    const double a = lo + (hi - lo) * p / panels;
    const double b = lo + (hi - lo) * (p + 1) / panels;
    gauss_legendre(count, gx, gw);
    const double mid = 0.5 * (a + b), hw = 0.5 * (b - a);
    for (int k = 0; k < count; ++k) {
      const double x = mid + hw * gx[k];
      g.x.push_back(x);
      g.w.push_back(hw * gw[k] * gauss_density(x, g.p0, g.s));
    }
  }
  return g;
}

double quad_peN(const IntegrationGrid& g,
                const std::function<double(double)>& pe_final) {
  double total = 0.0;
  for (size_t k = 0; k < g.x.size(); ++k) total += g.w[k] * pe_final(g.x[k]);
  return total;
}

double quad_expected_iters(
    const IntegrationGrid& g,
    const std::function<double(double, int)>& pe_at_flood, double n_bits,
    int layered_iters) {
  double total = 0.0;
  for (size_t k = 0; k < g.x.size(); ++k) {
    double acc = 0.0;
    for (int l = 1; l <= layered_iters; ++l) {
      const double p =
          std::clamp(pe_at_flood(g.x[k], 2 * (l - 1)), 0.0, 1.0);
      // P(some of the n_bits decisions still wrong) = 1 - (1-p)^n_bits.
      const double term =
          p >= 1.0 ? 1.0 : -std::expm1(n_bits * std::log1p(-p));
      acc += term;
      if (term < 1e-15) break;  // later iterations only shrink it
    }
    total += g.w[k] * acc;
  }
  return total;
}

void TraceTable::finalize() {
  assert(flood_iters % 2 == 0);
  const int rows = flood_iters / 2 + 1;
  const int n = static_cast<int>(xs.size());
  ylog_.assign(rows, {});
  slope_.assign(rows, {});
  std::vector<double> y(n);
  for (int r = 0; r < rows; ++r) {
    for (int i = 0; i < n; ++i) y[i] = std::log(pe[i][2 * r] + kLogFloor);
    ylog_[r] = y;
    slope_[r] = pchip_slopes(xs, y);
  }
}

double TraceTable::at(double x, int flood_idx) const {
  assert(flood_idx % 2 == 0 && flood_idx <= flood_iters);
  assert(!ylog_.empty() && "finalize() must run before at()");
  const int r = flood_idx / 2;
  const int n = static_cast<int>(xs.size());
  if (n == 1) return pe[0][flood_idx];
  if (x <= xs.front()) return std::exp(ylog_[r].front());
  if (x >= xs.back()) return std::exp(ylog_[r].back());
  int i = static_cast<int>(std::upper_bound(xs.begin(), xs.end(), x) -
                           xs.begin()) - 1;
  i = std::clamp(i, 0, n - 2);
  const double h = xs[i + 1] - xs[i];
  const double t = (x - xs[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  const double v = h00 * ylog_[r][i] + h10 * h * slope_[r][i] +
                   h01 * ylog_[r][i + 1] + h11 * h * slope_[r][i + 1];
  return std::min(std::exp(v), 1.0);
}

TraceTable build_trace_table(double x_lo, double x_hi, int flood_iters,
                             const std::function<DeTrace(double)>& run_at,
                             const TableBuildOpts& opts,
                             std::vector<double> must_include) {
  if (!(x_hi > x_lo)) throw config_error("trace table needs a proper range");
  TraceTable t;
  t.flood_iters = flood_iters;

  std::vector<double> seed;
  const int n0 = std::max(2, opts.init_nodes);
  for (int i = 0; i < n0; ++i)
    seed.push_back(x_lo + (x_hi - x_lo) * i / (n0 - 1));
  for (double v : must_include)
    if (v > x_lo && v < x_hi) seed.push_back(v);
  std::sort(seed.begin(), seed.end());
  for (double v : seed)
    if (t.xs.empty() || v - t.xs.back() > 1e-12) t.xs.push_back(v);

  for (double v : t.xs) {
    DeTrace tr = run_at(v);
    assert(static_cast<int>(tr.pe.size()) == flood_iters + 1);
    t.pe.push_back(std::move(tr.pe));
  }

  const int probe_rows[2] = {flood_iters, flood_iters / 2};
  auto logval = [&](int node, int f) {
    return std::log(std::max(t.pe[node][f], kRefineFloor));
  };
  while (static_cast<int>(t.xs.size()) < opts.max_nodes) {
    int worst = -1;
    double worst_score = opts.split_logstep;
    for (int i = 0; i + 1 < static_cast<int>(t.xs.size()); ++i) {
      if (t.xs[i + 1] - t.xs[i] < opts.min_dx) continue;
      for (int f : probe_rows) {
        const double score = std::abs(logval(i + 1, f) - logval(i, f));
        if (score > worst_score) {
          worst_score = score;
          worst = i;
        }
      }
    }
    if (worst < 0) break;
    const double mid = 0.5 * (t.xs[worst] + t.xs[worst + 1]);
    DeTrace tr = run_at(mid);
    t.xs.insert(t.xs.begin() + worst + 1, mid);
    t.pe.insert(t.pe.begin() + worst + 1, std::move(tr.pe));
  }
  t.finalize();
  return t;
}

const DeTrace& DeRunner::at(double x) {
  const uint64_t key = std::bit_cast<uint64_t>(x);
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  return memo_.emplace(key, de_run_at_p0(proto_, cfg_, x)).first->second;
}

std::pair<double, double> snap_range(double lo, double hi) {
  constexpr double kStep = 0.0025;
  double a = std::floor(lo / kStep) * kStep;
  double b = std::ceil(hi / kStep) * kStep;
  a = std::max(a, 1e-9);
  b = std::min(b, 0.5 - 1e-9);
  return {a, b};
}

TraceTable acquire_trace_table(const Protograph& proto, const DeConfig& cfg,
                               double x_lo, double x_hi,
                               const TableBuildOpts& opts,
                               const DeCache& cache, DeRunner& runner,
                               std::vector<double> must_include) {
  std::sort(must_include.begin(), must_include.end());
  const nlohmann::json key{
      {"proto", proto.canonical()}, {"q", cfg.q},
      {"alpha", cfg.alpha},         {"lambda", cfg.lambda},
      {"eps", cfg.eps},             {"flood", cfg.flood_iters},
      {"lo", x_lo},                 {"hi", x_hi},
      {"init", opts.init_nodes},    {"cap", opts.max_nodes},
      {"split", opts.split_logstep}, {"must", must_include}};
  if (auto hit = cache.get("trace-table", key)) {
    try {
      TraceTable t;
      t.flood_iters = cfg.flood_iters;
      t.xs = hit->at("xs").get<std::vector<double>>();
      t.pe = hit->at("pe").get<std::vector<std::vector<double>>>();
      if (t.xs.size() == t.pe.size() && !t.xs.empty()) {
        bool shaped = true;
        for (const auto& row : t.pe)
          shaped = shaped &&
                   static_cast<int>(row.size()) == cfg.flood_iters + 1;
        if (shaped) {
          t.finalize();
          return t;
        }
      }
    } catch (const std::exception&) {
      // Malformed payload: fall through and rebuild.
    }
    warn("ignoring malformed trace-table cache record");
  }
  TraceTable t = build_trace_table(x_lo, x_hi, cfg.flood_iters, runner.fn(),
                                   opts, must_include);
  cache.put("trace-table", key,
            nlohmann::json{{"xs", t.xs}, {"pe", t.pe}});
  return t;
}

}  // namespace fqms
