#pragma once

#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "fqms/cache.hpp"
#include "fqms/density_evolution.hpp"
#include "fqms/protograph.hpp"

namespace fqms {

// Finite-length surrogate: a block of N bits sees an empirical channel
// error fraction x that is approximately Gaussian around the nominal
// crossover p0 with variance p0(1-p0)/N.  Block error rate and expected
// iteration count are Gaussian-weighted integrals of the asymptotic
// evolution evaluated at x.

struct IntegrationGrid {
  double p0 = 0.0;
  double s = 0.0;               // std dev of the empirical fraction
  std::vector<double> x;        // quadrature nodes, ascending, in (0, 1/2)
  std::vector<double> w;        // nodes' weights including Gaussian density
};

// Composite Gauss-Legendre grid (8-point panels) over
// [p0 - k_sigma*s, p0 + k_sigma*s] clipped to (0, 1/2).
IntegrationGrid build_grid(double snr_db, double n_bits, int points = 64,
                           double k_sigma = 7.0);

// Block error probability: E_x[pe_final(x)].
double quad_peN(const IntegrationGrid& g,
                const std::function<double(double)>& pe_final);

// Expected layered iteration count with syndrome stopping:
// sum over l of P(not yet converged entering layered iteration l), where
// pe_at_flood(x, f) is the evolution's error probability after f flooding
// iterations (f = 2(l-1) entering layered iteration l).
double quad_expected_iters(const IntegrationGrid& g,
                           const std::function<double(double, int)>& pe_at_flood,
                           double n_bits, int layered_iters);

// Evolution traces tabulated at a set of crossover nodes with monotone
// cubic interpolation in log(pe) between them.  Only even flooding rows are
// interpolable: those are the ones layered-iteration accounting reads.
class TraceTable {
 public:
  std::vector<double> xs;                // ascending nodes
  std::vector<std::vector<double>> pe;   // pe[node][flood 0..F]
  int flood_iters = 0;

  void finalize();                       // build interpolation coefficients
  double at(double x, int flood_idx) const;  // clamped outside [xs front/back]

 private:
  // Interpolation data per even flood row: log values and Fritsch-Carlson
  // slopes, indexed [flood_idx/2][node].
  std::vector<std::vector<double>> ylog_, slope_;
};

struct TableBuildOpts {
  int init_nodes = 9;        // uniform seed nodes (endpoints included)
  int max_nodes = 49;
  double split_logstep = 1.0;  // refine intervals steeper than this in ln pe
  double min_dx = 1e-5;
};

// Adaptive tabulation: seed nodes plus bisection of the steepest intervals
// (judged on the final and mid flooding rows) until smooth or at capacity.
TraceTable build_trace_table(double x_lo, double x_hi, int flood_iters,
                             const std::function<DeTrace(double)>& run_at,
                             const TableBuildOpts& opts,
                             std::vector<double> must_include = {});

// Memoizing evolution runner for one configuration at varying crossover.
class DeRunner {
 public:
  DeRunner(const Protograph& proto, const DeConfig& cfg)
      : proto_(proto), cfg_(cfg) {}
  const DeTrace& at(double x);
  std::function<DeTrace(double)> fn() {
    return [this](double x) -> DeTrace { return at(x); };
  }

 private:
  Protograph proto_;
  DeConfig cfg_;
  std::map<uint64_t, DeTrace> memo_;
};

// Snap a crossover range outward to a coarse lattice so near-identical
// requests share cached tables.
std::pair<double, double> snap_range(double lo, double hi);

// Table acquisition with persistent caching: loads a previously computed
// table for (protograph, decoder config, range) or builds and stores one.
TraceTable acquire_trace_table(const Protograph& proto, const DeConfig& cfg,
                               double x_lo, double x_hi,
                               const TableBuildOpts& opts,
                               const DeCache& cache, DeRunner& runner,
                               std::vector<double> must_include = {});

}  // namespace fqms
