#include "fqms/optimizer.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>

#include "fqms/channel.hpp"
#include "fqms/common.hpp"

namespace fqms {

std::vector<double> SearchSpace::alphas() const {
  if (!(alpha_step > 0.0) || alpha_max < alpha_min)
    throw config_error("bad alpha grid");
  const int count =
      static_cast<int>(std::lround((alpha_max - alpha_min) / alpha_step)) + 1;
  std::vector<double> a(count);
  for (int i = 0; i < count; ++i) a[i] = alpha_min + i * alpha_step;
  return a;
}

std::vector<double> SearchSpace::eps_grid(const TechModel& tech) const {
  if (eps_points < 1) throw config_error("need at least one fault level");
  if (eg_min > eg_max) throw config_error("bad guard-energy window");
  std::vector<double> eps(eps_points);
  for (int k = 0; k < eps_points; ++k) {
    const double f = eps_points == 1
                         ? 0.0
                         : static_cast<double>(k) / (eps_points - 1);
    const double eg = eg_max + (eg_min - eg_max) * f;
    eps[k] = tech.epsilon_of_eg(eg);  // ascending in k
  }
  return eps;
}

std::vector<int> SearchSpace::block_lengths(int n_cols) const {
  if (z_min < 1 || z_step < 1 || z_max < z_min)
    throw config_error("bad lifting-factor grid");
  std::vector<int> ns;
  for (int z = z_min; z <= z_max; z += z_step) ns.push_back(n_cols * z);
  return ns;
}

bool preferred(const OptPoint& a, const OptPoint& b) {
  if (a.energy_pj != b.energy_pj) return a.energy_pj < b.energy_pj;
  if (a.q != b.q) return a.q < b.q;
  if (a.N != b.N) return a.N < b.N;
  return a.eps > b.eps;
}

Optimizer::Optimizer(Protograph proto, TechModel tech, Target target,
                     SearchSpace space, DeCache cache)
    : proto_(std::move(proto)),
      tech_(std::move(tech)),
      target_(target),
      space_(std::move(space)),
      cache_(std::move(cache)) {
  if (space_.q_min < 2 || space_.q_max > 12 || space_.q_min > space_.q_max)
    throw config_error("quantizer width range must sit inside [2, 12]");
  if (space_.layered_iters < 1 || space_.rounds < 0)
    throw config_error("bad iteration limits");
  if (space_.lambdas.empty()) throw config_error("offset set is empty");
  if (!(target_.pe_star > 0.0 && target_.pe_star < 1.0))
    throw config_error("error-rate target must lie in (0, 1)");
  eps_grid_ = space_.eps_grid(tech_);
  n_grid_ = space_.block_lengths(proto_.n);
  alphas_ = space_.alphas();

  const double p0 = p0_of_snr_db(target_.snr_db);
  const double n_min = static_cast<double>(n_grid_.front());
  const double n_max = static_cast<double>(n_grid_.back());
  const double s_max = std::sqrt(p0 * (1.0 - p0) / n_min);
  std::tie(x_lo_, x_hi_) =
      snap_range(p0 - space_.k_sigma * s_max, p0 + space_.k_sigma * s_max);
  const double s_ref = std::sqrt(p0 * (1.0 - p0) / std::sqrt(n_min * n_max));
  const double margin = 1e-6 * (x_hi_ - x_lo_);
  for (double x :
       {p0 - 1.5 * s_ref, p0, p0 + 1.5 * s_ref})
    stage1_x_.push_back(std::clamp(x, x_lo_ + margin, x_hi_ - margin));
}

DeConfig Optimizer::de_config(int q, double eps,
                              const PairChoice& pair) const {
  DeConfig cfg;
  cfg.q = q;
  cfg.alpha = pair.alpha;
  cfg.lambda = pair.lambda;
  cfg.eps = eps;
  cfg.flood_iters = 2 * space_.layered_iters;
  return cfg;
}

Optimizer::Cell& Optimizer::cell_for(int q, double eps) {
  const auto key = std::make_pair(q, std::bit_cast<uint64_t>(eps));
  if (auto it = cells_.find(key); it != cells_.end()) return it->second;

  // Stage 1: rank every (alpha, lambda) pair by a three-node proxy of its
  // fixed-point error probability across the crossover range.
  struct Ranked {
    double proxy, alpha;
    int lambda;
  };
  std::vector<Ranked> ranked;
  const nlohmann::json s1_key{{"proto", proto_.canonical()},
                              {"q", q},
                              {"eps", eps},
                              {"flood", 2 * space_.layered_iters},
                              {"xs", stage1_x_},
                              {"alphas", alphas_},
                              {"lambdas", space_.lambdas}};
  bool from_cache = false;
  if (auto hit = cache_.get("stage1", s1_key)) {
    try {
      for (const auto& e : *hit)
        ranked.push_back({e.at("p").get<double>(), e.at("a").get<double>(),
                          e.at("l").get<int>()});
      from_cache = ranked.size() == alphas_.size() * space_.lambdas.size();
    } catch (const std::exception&) {
      from_cache = false;
    }
    if (!from_cache) {
      ranked.clear();
      warn("ignoring malformed pair-ranking cache record");
    }
  }
  if (!from_cache) {
    for (int lambda : space_.lambdas) {
      for (double alpha : alphas_) {
        DeRunner runner(proto_, de_config(q, eps, {alpha, lambda}));
        const double proxy = 0.25 * runner.at(stage1_x_[0]).pe.back() +
                             0.50 * runner.at(stage1_x_[1]).pe.back() +
                             0.25 * runner.at(stage1_x_[2]).pe.back();
        ranked.push_back({proxy, alpha, lambda});
      }
    }
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& r : ranked)
      entries.push_back({{"a", r.alpha}, {"l", r.lambda}, {"p", r.proxy}});
    cache_.put("stage1", s1_key, entries);
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a,
                                             const Ranked& b) {
    if (a.proxy != b.proxy) return a.proxy < b.proxy;
    if (a.alpha != b.alpha) return a.alpha < b.alpha;
    return a.lambda < b.lambda;
  });

  // Stage 2: full interpolation tables for the short list.
  Cell cell;
  const double best_proxy = ranked.front().proxy;
  for (const Ranked& r : ranked) {
    const int kept = static_cast<int>(cell.survivors.size());
    if (kept >= space_.stage1_keep) break;
    if (kept >= 4 && r.proxy > best_proxy * space_.stage1_factor) break;
    const PairChoice pair{r.alpha, r.lambda};
    DeRunner runner(proto_, de_config(q, eps, pair));
    TraceTable table =
        acquire_trace_table(proto_, de_config(q, eps, pair), x_lo_, x_hi_,
                            space_.table_opts, cache_, runner, stage1_x_);
    cell.survivors.push_back({pair, std::move(table)});
  }
  return cells_.emplace(key, std::move(cell)).first->second;
}

OptPoint Optimizer::evaluate(int q, double eps, int N) {
  Cell& cell = cell_for(q, eps);
  const IntegrationGrid grid = build_grid(target_.snr_db, N,
                                          space_.grid_points,
                                          space_.k_sigma);
  const int F = 2 * space_.layered_iters;

  int best_idx = -1;
  double best_pe = std::numeric_limits<double>::infinity();
  for (int si = 0; si < static_cast<int>(cell.survivors.size()); ++si) {
    const TraceTable& t = cell.survivors[si].table;
    const double pe =
        quad_peN(grid, [&](double x) { return t.at(x, F); });
    const PairChoice& p = cell.survivors[si].pair;
    const PairChoice* bp =
        best_idx < 0 ? nullptr : &cell.survivors[best_idx].pair;
    const bool take =
        best_idx < 0 || pe < best_pe ||
        (pe == best_pe &&
         (p.alpha < bp->alpha ||
          (p.alpha == bp->alpha && p.lambda < bp->lambda)));
    if (take) {
      best_idx = si;
      best_pe = pe;
    }
  }

  OptPoint pt;
  pt.q = q;
  pt.N = N;
  pt.eps = eps;
  pt.pair = cell.survivors[best_idx].pair;
  pt.pe = best_pe;
  pt.eg = tech_.eg_of_epsilon(eps);
  if (best_pe < target_.pe_star) {
    const TraceTable& t = cell.survivors[best_idx].table;
    pt.iters = quad_expected_iters(
        grid, [&](double x, int f) { return t.at(x, f); },
        static_cast<double>(N), space_.layered_iters);
    const EnergyBreakdown e =
        decoding_energy(proto_, q, tech_, eps, pt.iters);
    pt.energy_pj = e.energy_pj;
    pt.feasible = true;
  }
  return pt;
}

std::pair<double, PairChoice> Optimizer::message_tuning(int q, double eps,
                                                        int N) {
  const OptPoint pt = evaluate(q, eps, N);
  return {pt.pe, pt.pair};
}

OptOutcome Optimizer::coordinate_descent() {
  OptOutcome out;
  OptPoint cur = evaluate(space_.q_max, eps_grid_.front(), n_grid_.back());
  if (!cur.feasible)
    throw infeasible_error(
        "error-rate target unreachable even with the finest quantizer, "
        "longest block and lowest fault rate in the search space");
  out.history.push_back({"init", cur});

  for (int round = 1; round <= space_.rounds; ++round) {
    const OptPoint entered = cur;
    const std::string tag = "round" + std::to_string(round);

    OptPoint best = cur;
    for (int q = space_.q_min; q <= space_.q_max; ++q) {
      const OptPoint p = evaluate(q, cur.eps, cur.N);
      if (p.feasible && preferred(p, best)) best = p;
    }
    cur = best;
    out.history.push_back({tag + ":q", cur});

    best = cur;
    for (int N : n_grid_) {
      const OptPoint p = evaluate(cur.q, cur.eps, N);
      if (p.feasible && preferred(p, best)) best = p;
    }
    cur = best;
    out.history.push_back({tag + ":N", cur});

    best = cur;
    for (double eps : eps_grid_) {
      const OptPoint p = evaluate(cur.q, eps, cur.N);
      // Noise beyond the first failing level only loses more ground.
      if (!p.feasible) break;
      if (preferred(p, best)) best = p;
    }
    cur = best;
    out.history.push_back({tag + ":eps", cur});

    if (cur.q == entered.q && cur.N == entered.N && cur.eps == entered.eps)
      break;
  }
  out.best = cur;
  return out;
}

OptOutcome Optimizer::exhaustive(bool prune) {
  OptOutcome out;
  OptPoint best;
  bool have = false;
  for (int q = space_.q_min; q <= space_.q_max; ++q) {
    const double factor = per_iter_bits_per_info_bit(proto_, q);
    // Iteration counts cannot drop when the fault level rises, so the best
    // count seen at lower eps bounds the energy of the cells above it.
    double iters_floor = 0.0;
    for (double eps : eps_grid_) {
      if (prune && have && iters_floor > 0.0) {
        const double e_lb = factor *
                            tech_.bit_energy_pj(tech_.eg_of_epsilon(eps)) *
                            iters_floor;
        if (e_lb > best.energy_pj) continue;
      }
      bool any_feasible = false;
      double min_iters = std::numeric_limits<double>::infinity();
      for (int N : n_grid_) {
        const OptPoint p = evaluate(q, eps, N);
        if (!p.feasible) continue;
        any_feasible = true;
        min_iters = std::min(min_iters, p.iters);
        if (!have || preferred(p, best)) {
          best = p;
          have = true;
        }
      }
      if (!any_feasible) break;  // feasibility shrinks as eps grows
      iters_floor = std::max(iters_floor, min_iters);
    }
  }
  if (!have)
    throw infeasible_error("no feasible design point in the search space");
  out.best = best;
  out.history.push_back({"exhaustive", best});
  return out;
}

OptOutcome Optimizer::optimize_q_only(double eg, int N) {
  const double eps = tech_.epsilon_of_eg(eg);
  OptOutcome out;
  OptPoint best;
  bool have = false;
  for (int q = space_.q_min; q <= space_.q_max; ++q) {
    const OptPoint p = evaluate(q, eps, N);
    out.history.push_back({"q" + std::to_string(q), p});
    if (p.feasible && (!have || preferred(p, best))) {
      best = p;
      have = true;
    }
  }
  if (!have)
    throw infeasible_error("no quantizer width meets the target at the "
                           "requested operating point");
  out.best = best;
  return out;
}

OptOutcome Optimizer::optimize_q_and_N(double eg) {
  const double eps = tech_.epsilon_of_eg(eg);
  OptOutcome out;
  OptPoint best;
  bool have = false;
  for (int q = space_.q_min; q <= space_.q_max; ++q) {
    for (int N : n_grid_) {
      const OptPoint p = evaluate(q, eps, N);
      if (p.feasible && (!have || preferred(p, best))) {
        best = p;
        have = true;
      }
    }
  }
  if (!have)
    throw infeasible_error("no (quantizer, block length) pair meets the "
                           "target at the requested guard energy");
  out.best = best;
  out.history.push_back({"qN", best});
  return out;
}

}  // namespace fqms
