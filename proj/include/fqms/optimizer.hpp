#pragma once

#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fqms/cache.hpp"
#include "fqms/energy.hpp"
#include "fqms/finite_length.hpp"
#include "fqms/protograph.hpp"

namespace fqms {

// Operating requirement: block error probability below pe_star at the
// design SNR.
struct Target {
  double pe_star = 1e-3;
  double snr_db = 1.45;
};

// Discrete design space for (q, N, eps) plus the message-scaling/offset
// grid tuned inside every candidate cell.
struct SearchSpace {
  int q_min = 3, q_max = 8;
  int z_min = 250, z_max = 2500, z_step = 10;  // lifting factors
  int eps_points = 40;                          // log-spaced fault levels
  double eg_min = 0.5, eg_max = 1.0;            // guard-energy window
  double alpha_min = 0.1, alpha_max = 2.0, alpha_step = 0.05;
  std::vector<int> lambdas{0, 1, 2};
  int rounds = 3;             // coordinate-descent sweeps
  int layered_iters = 50;     // decoding iteration budget L
  int grid_points = 64;       // quadrature nodes
  double k_sigma = 7.0;       // quadrature range half-width in std devs
  int stage1_keep = 10;       // candidate (alpha, lambda) pairs kept
  double stage1_factor = 3.0; // stage-1 proxy tolerance factor
  TableBuildOpts table_opts{};

  std::vector<double> alphas() const;
  std::vector<double> eps_grid(const TechModel& tech) const;  // ascending
  std::vector<int> block_lengths(int n_cols) const;           // ascending
};

struct PairChoice {
  double alpha = 1.0;
  int lambda = 0;
};

struct OptPoint {
  int q = 0;
  int N = 0;
  double eps = 0.0;
  PairChoice pair;
  double pe = 1.0;      // block error probability after pair tuning
  double iters = 0.0;   // expected layered iterations
  double eg = 0.0;
  double energy_pj = std::numeric_limits<double>::infinity();
  bool feasible = false;
};

struct OptStep {
  std::string what;
  OptPoint point;
};

struct OptOutcome {
  OptPoint best;
  std::vector<OptStep> history;
};

// Minimizes expected decoding energy per information bit over the design
// space subject to the error-rate target.  All candidate evaluations flow
// through per-(q, eps) cells: a cheap proxy ranks the (alpha, lambda)
// grid, the short-listed pairs get full interpolation tables, and every
// block length reuses those tables.  Cells are memoized in RAM and, when a
// cache is configured, on disk.
class Optimizer {
 public:
  Optimizer(Protograph proto, TechModel tech, Target target,
            SearchSpace space, DeCache cache = {});

  // Full evaluation of one design point.
  OptPoint evaluate(int q, double eps, int N);

  // Block error probability minimized over the (alpha, lambda) grid, with
  // the minimizing pair.
  std::pair<double, PairChoice> message_tuning(int q, double eps, int N);

  // Greedy minimization: sweeps q, then N, then eps, repeated.  Starts
  // from the most capable corner (finest quantizer, longest block, lowest
  // fault rate); throws infeasible_error when even that misses the target.
  OptOutcome coordinate_descent();

  // Full scan of the (q, N, eps) lattice.  With prune = true, cells that
  // provably cannot beat the incumbent (fault level monotonicity of the
  // iteration count) are skipped.
  OptOutcome exhaustive(bool prune = true);

  // Reference policies: tune only q at a fixed operating point, or (q, N)
  // at a fixed guard energy.
  OptOutcome optimize_q_only(double eg, int N);
  OptOutcome optimize_q_and_N(double eg);

  const Protograph& proto() const { return proto_; }
  const TechModel& tech() const { return tech_; }
  const Target& target() const { return target_; }
  const SearchSpace& space() const { return space_; }
  const std::vector<double>& eps_values() const { return eps_grid_; }
  const std::vector<int>& block_lengths() const { return n_grid_; }

 private:
  struct Survivor {
    PairChoice pair;
    TraceTable table;
  };
  struct Cell {
    std::vector<Survivor> survivors;  // ranked by stage-1 proxy
  };

  Cell& cell_for(int q, double eps);
  DeConfig de_config(int q, double eps, const PairChoice& pair) const;
  // (pe, survivor index) at one block length, ties broken toward smaller
  // alpha then smaller lambda.
  std::pair<double, int> cell_pe(const Cell& cell, int N);

  Protograph proto_;
  TechModel tech_;
  Target target_;
  SearchSpace space_;
  DeCache cache_;

  std::vector<double> eps_grid_;
  std::vector<int> n_grid_;
  std::vector<double> alphas_;
  double x_lo_ = 0.0, x_hi_ = 0.0;   // shared table range
  std::vector<double> stage1_x_;     // proxy nodes
  std::map<std::pair<int, uint64_t>, Cell> cells_;
};

// Preference order over evaluated points: lower energy, then smaller q,
// then smaller N, then larger eps.
bool preferred(const OptPoint& a, const OptPoint& b);

}  // namespace fqms
