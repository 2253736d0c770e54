#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include "fqms/cache.hpp"
#include "fqms/channel.hpp"
#include "fqms/common.hpp"
#include "fqms/config.hpp"
#include "fqms/decoder.hpp"
#include "fqms/density_evolution.hpp"
#include "fqms/energy.hpp"
#include "fqms/finite_length.hpp"
#include "fqms/optimizer.hpp"
#include "fqms/protograph.hpp"
#include "fqms/report.hpp"
#include "fqms/sim.hpp"

namespace {

using namespace fqms;

nlohmann::json point_json(const OptPoint& pt) {
  return nlohmann::json{{"q", pt.q},
                        {"n", pt.N},
                        {"eps", pt.eps},
                        {"eg", pt.eg},
                        {"alpha", pt.pair.alpha},
                        {"lambda", pt.pair.lambda},
                        {"pe", pt.pe},
                        {"iters", pt.iters},
                        {"energy_pj", pt.energy_pj},
                        {"feasible", pt.feasible}};
}

int resolve_block_length(const RunParams& p, const Protograph& proto) {
  if (p.n_bits > 0) {
    if (p.n_bits % proto.n != 0)
      throw config_error("block length must be a multiple of the " +
                         std::to_string(proto.n) + " protograph columns");
    return p.n_bits;
  }
  if (p.z > 0) return p.z * proto.n;
  throw config_error("give a block length (--n) or lifting factor (--z)");
}

void add_common(CLI::App* sub, RunParams& p, std::string& config_path) {
  sub->add_option("--config", config_path, "JSON config file");
  sub->add_option("--protograph", p.protograph,
                  "preset name, matrix file, or inline rows 'a b; c d'");
  sub->add_option("--seed", p.seed, "master seed");
  sub->add_option("--out", p.out, "output path (default stdout)");
  sub->add_option("--format", p.format, "output format: json or csv");
  sub->add_option("--cache-dir", p.cache_dir,
                  "result cache directory (default $FQMS_CACHE_DIR)");
  sub->add_option("--workers", p.workers, "worker threads for simulation");
  sub->add_option("--tech", p.tech, "memory technology preset");
}

void add_decoder(CLI::App* sub, RunParams& p) {
  sub->add_option("--q", p.q, "message quantizer width in bits");
  sub->add_option("--alpha", p.alpha, "channel scale");
  sub->add_option("--lambda", p.lambda, "min-sum offset");
  sub->add_option("--eps", p.eps, "memory fault probability per bit");
  sub->add_option("--eg", p.eg, "memory guard energy (sets eps)");
  sub->add_option("--iters", p.iters, "decoding iteration budget");
}

int cmd_threshold(const RunParams& p) {
  const Protograph proto = resolve_protograph(p.protograph);
  const TechModel tech = tech_preset(p.tech);
  DeConfig cfg;
  cfg.q = p.q;
  cfg.alpha = p.alpha;
  cfg.lambda = p.lambda;
  cfg.eps = resolve_eps(p, tech);
  cfg.flood_iters = 2 * p.iters;
  const double thr =
      de_threshold(proto, cfg, p.threshold_pe, p.snr_lo, p.snr_hi);
  const DeTrace at_thr = de_run(proto, cfg, thr);
  nlohmann::json results{{"threshold_db", thr},
                         {"pe_target", p.threshold_pe},
                         {"pe_at_threshold", at_thr.pe.back()},
                         {"eps", cfg.eps}};
  write_text(p.out, render_report("threshold", params_json(p), results,
                                  p.format));
  return 0;
}

int cmd_ber(const RunParams& p) {
  const Protograph proto = resolve_protograph(p.protograph);
  const TechModel tech = tech_preset(p.tech);
  const DeCache cache = DeCache::resolve(p.cache_dir);
  const int N = resolve_block_length(p, proto);
  const int Z = N / proto.n;
  const LiftedCode code = lift(proto, Z, p.seed);

  std::vector<double> snrs = parse_sweep(p.snr_sweep);
  if (snrs.empty()) snrs = {p.snr_db};
  const double eps = resolve_eps(p, tech);

  DecoderConfig dc;
  dc.q = p.q;
  dc.alpha = p.alpha;
  dc.lambda = p.lambda;
  dc.eps = eps;
  dc.max_iters = p.iters;
  dc.fault_model = parse_fault_model(p.fault_model);
  dc.schedule = parse_schedule(p.schedule);
  dc.force_full_iters = p.force_full_iters;

  // Analytical companion curve at the same operating point.
  DeConfig de;
  de.q = p.q;
  de.alpha = p.alpha;
  de.lambda = p.lambda;
  de.eps = dc.fault_model == FaultModel::none ? 0.0 : eps;
  de.flood_iters = 2 * p.iters;
  const double p_lo = p0_of_snr_db(snrs.back());
  const double p_hi = p0_of_snr_db(snrs.front());
  const double s = std::sqrt(p_hi * (1.0 - p_hi) / N);
  const auto [x_lo, x_hi] = snap_range(p_lo - 7.0 * s, p_hi + 7.0 * s);
  DeRunner runner(proto, de);
  const TraceTable table = acquire_trace_table(
      proto, de, x_lo, x_hi, TableBuildOpts{}, cache, runner);
  const double factor = per_iter_bits_per_info_bit(proto, p.q);
  const double e_bit = tech.bit_energy_pj(tech.eg_of_epsilon(eps));

  ResultTable tab;
  tab.columns = {"snr_db", "frames", "frame_errors", "ber", "fer",
                 "avg_iters", "pred_ber", "pred_iters", "pred_energy_pj"};
  McOptions mc;
  mc.seed = p.seed;
  mc.target_frame_errors = p.frame_errors;
  mc.max_frames = p.max_frames;
  mc.workers = p.workers;
  for (double snr : snrs) {
    const ChannelParams ch{snr, p.alpha};
    const McResult r = run_campaign(code, ch, dc, mc);
    const IntegrationGrid grid = build_grid(snr, N, p.grid_points, 7.0);
    const double pred = quad_peN(grid, [&](double x) {
      return table.at(x, de.flood_iters);
    });
    const double pred_iters = quad_expected_iters(
        grid, [&](double x, int f) { return table.at(x, f); },
        static_cast<double>(N), p.iters);
    tab.add_row({format_double(snr), std::to_string(r.frames),
                 std::to_string(r.frame_errors), format_double(r.ber()),
                 format_double(r.fer()), format_double(r.avg_iters()),
                 format_double(pred), format_double(pred_iters),
                 format_double(factor * e_bit * pred_iters)});
  }
  nlohmann::json results{{"n", N}, {"z", Z}, {"eps", eps}};
  write_text(p.out, render_report("ber", params_json(p), results, p.format,
                                  &tab));
  return 0;
}

int cmd_optimize(const RunParams& p) {
  const Protograph proto = resolve_protograph(p.protograph);
  const TechModel tech = tech_preset(p.tech);
  const DeCache cache = DeCache::resolve(p.cache_dir);
  Target target{p.target_pe, p.snr_db};
  Optimizer opt(proto, tech, target, search_space_of(p), cache);
  OptOutcome oc;
  if (p.mode == "descent") {
    oc = opt.coordinate_descent();
  } else if (p.mode == "exhaustive") {
    oc = opt.exhaustive();
  } else {
    throw config_error("unknown mode '" + p.mode +
                       "' (expected descent or exhaustive)");
  }
  nlohmann::json hist = nlohmann::json::array();
  ResultTable tab;
  tab.columns = {"step", "q", "n", "eps", "eg", "alpha",
                 "lambda", "pe", "iters", "energy_pj"};
  for (const OptStep& st : oc.history) {
    nlohmann::json h = point_json(st.point);
    h["step"] = st.what;
    hist.push_back(h);
    tab.add_row({st.what, std::to_string(st.point.q),
                 std::to_string(st.point.N), format_double(st.point.eps),
                 format_double(st.point.eg),
                 format_double(st.point.pair.alpha),
                 std::to_string(st.point.pair.lambda),
                 format_double(st.point.pe), format_double(st.point.iters),
                 format_double(st.point.energy_pj)});
  }
  nlohmann::json results{{"best", point_json(oc.best)},
                         {"history", hist},
                         {"protograph_matrix", proto.canonical()}};
  write_text(p.out, render_report("optimize", params_json(p), results,
                                  p.format, &tab));
  return 0;
}

int cmd_energy_curve(const RunParams& p) {
  const Protograph proto = resolve_protograph(p.protograph);
  const TechModel tech = tech_preset(p.tech);
  const DeCache cache = DeCache::resolve(p.cache_dir);
  const int N = resolve_block_length(p, proto);
  Target target{p.target_pe, p.snr_db};
  Optimizer opt(proto, tech, target, search_space_of(p), cache);
  ResultTable tab;
  tab.columns = {"eg", "eps", "alpha", "lambda", "pe",
                 "feasible", "iters", "energy_pj"};
  for (double eps : opt.eps_values()) {
    const OptPoint pt = opt.evaluate(p.q, eps, N);
    tab.add_row({format_double(pt.eg), format_double(pt.eps),
                 format_double(pt.pair.alpha),
                 std::to_string(pt.pair.lambda), format_double(pt.pe),
                 pt.feasible ? "1" : "0", format_double(pt.iters),
                 format_double(pt.energy_pj)});
  }
  nlohmann::json results{{"n", N}, {"q", p.q}};
  write_text(p.out, render_report("energy-curve", params_json(p), results,
                                  p.format, &tab));
  return 0;
}

int cmd_export_alist(const RunParams& p) {
  const Protograph proto = resolve_protograph(p.protograph);
  if (p.z < 1) throw config_error("export needs a lifting factor (--z)");
  const LiftedCode code = lift(proto, p.z, p.seed);
  if (has_length4_cycle(code))
    warn("lifted graph still contains length-4 cycles at Z=" +
         std::to_string(p.z));
  write_text(p.out, export_alist(code));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  RunParams p;
  std::string config_path;
  // First pass: config file values become defaults, explicit flags win.
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) config_path = argv[i + 1];
    else if (arg.rfind("--config=", 0) == 0) config_path = arg.substr(9);
  }
  try {
    if (!config_path.empty()) load_config_file(p, config_path);

    CLI::App app{"quantized faulty Min-Sum LDPC decoding toolkit"};
    app.require_subcommand(1);

    CLI::App* thr = app.add_subcommand(
        "threshold", "decoding threshold of the analytical model");
    add_common(thr, p, config_path);
    add_decoder(thr, p);
    thr->add_option("--target-pe", p.threshold_pe,
                    "error probability defining the threshold");
    thr->add_option("--snr-lo", p.snr_lo, "search interval low end (dB)");
    thr->add_option("--snr-hi", p.snr_hi, "search interval high end (dB)");

    CLI::App* ber = app.add_subcommand(
        "ber", "Monte-Carlo error rates with analytical companion");
    add_common(ber, p, config_path);
    add_decoder(ber, p);
    ber->add_option("--snr", p.snr_sweep, "SNR (dB), single or lo:hi:step");
    ber->add_option("--n", p.n_bits, "block length");
    ber->add_option("--z", p.z, "lifting factor (alternative to --n)");
    ber->add_option("--fault-model", p.fault_model,
                    "none, hardware, or simplified");
    ber->add_option("--schedule", p.schedule, "layered or flooding");
    ber->add_option("--frame-errors", p.frame_errors,
                    "stop after this many frame errors");
    ber->add_option("--max-frames", p.max_frames, "frame budget");
    ber->add_flag("--force-full-iters", p.force_full_iters,
                  "disable syndrome early stopping");
    ber->add_option("--grid-points", p.grid_points,
                    "quadrature nodes for predictions");

    CLI::App* op = app.add_subcommand(
        "optimize", "minimize decoding energy subject to the error target");
    add_common(op, p, config_path);
    op->add_option("--snr", p.snr_db, "design SNR (dB)");
    op->add_option("--target-pe", p.target_pe, "error-rate requirement");
    op->add_option("--mode", p.mode, "descent or exhaustive");
    op->add_option("--iters", p.iters, "decoding iteration budget");
    op->add_option("--q-min", p.q_min, "smallest quantizer width");
    op->add_option("--q-max", p.q_max, "largest quantizer width");
    op->add_option("--z-min", p.z_min, "smallest lifting factor");
    op->add_option("--z-max", p.z_max, "largest lifting factor");
    op->add_option("--z-step", p.z_step, "lifting factor stride");
    op->add_option("--eps-points", p.eps_points, "fault-level grid size");
    op->add_option("--eg-min", p.eg_min, "lowest guard energy");
    op->add_option("--eg-max", p.eg_max, "highest guard energy");
    op->add_option("--rounds", p.rounds, "descent sweeps");
    op->add_option("--grid-points", p.grid_points, "quadrature nodes");

    CLI::App* ec = app.add_subcommand(
        "energy-curve", "energy and feasibility across fault levels");
    add_common(ec, p, config_path);
    ec->add_option("--snr", p.snr_db, "design SNR (dB)");
    ec->add_option("--target-pe", p.target_pe, "error-rate requirement");
    ec->add_option("--q", p.q, "message quantizer width in bits");
    ec->add_option("--n", p.n_bits, "block length");
    ec->add_option("--z", p.z, "lifting factor (alternative to --n)");
    ec->add_option("--iters", p.iters, "decoding iteration budget");
    ec->add_option("--eps-points", p.eps_points, "fault-level grid size");
    ec->add_option("--eg-min", p.eg_min, "lowest guard energy");
    ec->add_option("--eg-max", p.eg_max, "highest guard energy");
    ec->add_option("--grid-points", p.grid_points, "quadrature nodes");

    CLI::App* ex = app.add_subcommand(
        "export-alist", "lift a protograph and emit the adjacency list");
    add_common(ex, p, config_path);
    ex->add_option("--z", p.z, "lifting factor");

    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      app.exit(e);
      return 2;
    }

    if (thr->parsed()) return cmd_threshold(p);
    if (ber->parsed()) return cmd_ber(p);
    if (op->parsed()) return cmd_optimize(p);
    if (ec->parsed()) return cmd_energy_curve(p);
    if (ex->parsed()) return cmd_export_alist(p);
    return 2;
  } catch (const fqms::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const fqms::infeasible_error& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
