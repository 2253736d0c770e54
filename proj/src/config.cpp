#include "fqms/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "fqms/common.hpp"

namespace fqms {
namespace {

template <typename T>
void take(const nlohmann::json& j, const char* key, T& dst) {
  if (j.contains(key)) {
    try {
      dst = j.at(key).get<T>();
    } catch (const std::exception&) {
      throw config_error(std::string("config key '") + key +
                         "' has the wrong type");
    }
  }
}

}  // namespace

void apply_config_json(RunParams& p, const nlohmann::json& j) {
  if (!j.is_object()) throw config_error("config file must hold an object");
  static const char* known_keys[] = {
      "protograph", "tech", "snr", "snr-sweep", "q", "eps", "eg", "n", "z",
      "alpha", "lambda", "iters", "seed", "workers", "out", "format",
      "cache-dir", "fault-model", "schedule", "mode", "target-pe",
      "threshold-pe", "snr-lo", "snr-hi", "frame-errors", "max-frames",
      "force-full-iters", "q-min", "q-max", "z-min", "z-max", "z-step",
      "eps-points", "eg-min", "eg-max", "rounds", "grid-points"};
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : known_keys) known = known || item.key() == k;
    if (!known)
      throw config_error("unknown config key '" + item.key() + "'");
  }
  auto field = [&](const char* key, auto& dst) { take(j, key, dst); };
  field("protograph", p.protograph);
  field("tech", p.tech);
  field("snr", p.snr_db);
  field("snr-sweep", p.snr_sweep);
  field("q", p.q);
  field("eps", p.eps);
  field("eg", p.eg);
  field("n", p.n_bits);
  field("z", p.z);
  field("alpha", p.alpha);
  field("lambda", p.lambda);
  field("iters", p.iters);
  field("seed", p.seed);
  field("workers", p.workers);
  field("out", p.out);
  field("format", p.format);
  field("cache-dir", p.cache_dir);
  field("fault-model", p.fault_model);
  field("schedule", p.schedule);
  field("mode", p.mode);
  field("target-pe", p.target_pe);
  field("threshold-pe", p.threshold_pe);
  field("snr-lo", p.snr_lo);
  field("snr-hi", p.snr_hi);
  field("frame-errors", p.frame_errors);
  field("max-frames", p.max_frames);
  field("force-full-iters", p.force_full_iters);
  field("q-min", p.q_min);
  field("q-max", p.q_max);
  field("z-min", p.z_min);
  field("z-max", p.z_max);
  field("z-step", p.z_step);
  field("eps-points", p.eps_points);
  field("eg-min", p.eg_min);
  field("eg-max", p.eg_max);
  field("rounds", p.rounds);
  field("grid-points", p.grid_points);
}

void load_config_file(RunParams& p, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw config_error("config file '" + path + "' is not valid JSON: " +
                       e.what());
  }
  apply_config_json(p, j);
}

Protograph resolve_protograph(const std::string& spec_text) {
  // Preset name, then a readable file, then an inline matrix.
  try {
    return protograph_preset(spec_text);
  } catch (const config_error&) {
  }
  if (std::ifstream in(spec_text); in) {
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_protograph(ss.str(), spec_text);
  }
  if (spec_text.find_first_of(";\n") != std::string::npos)
    return parse_protograph(spec_text, "inline");
  throw config_error("'" + spec_text +
                     "' is neither a known protograph preset, a readable "
                     "file, nor an inline matrix");
}

double resolve_eps(const RunParams& p, const TechModel& tech) {
  if (p.eps >= 0.0 && p.eg >= 0.0)
    throw config_error("give either a fault probability or a guard energy, "
                       "not both");
  if (p.eps >= 0.0) {
    if (p.eps > 1.0) throw config_error("fault probability above 1");
    return p.eps;
  }
  const double eg = p.eg >= 0.0 ? p.eg : 1.0;
  return tech.epsilon_of_eg(eg);
}

std::vector<double> parse_sweep(const std::string& text) {
  if (text.empty()) return {};
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ':')) {
    try {
      size_t pos = 0;
      parts.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw config_error("bad sweep component '" + tok + "'");
    }
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3)
    throw config_error("sweep must be a single value or lo:hi:step");
  const double lo = parts[0], hi = parts[1], step = parts[2];
  if (!(step > 0.0) || hi < lo) throw config_error("bad sweep bounds");
  std::vector<double> xs;
  for (int k = 0;; ++k) {
    const double x = lo + k * step;
    if (x > hi + 1e-9 * step) break;
    xs.push_back(std::min(x, hi));
  }
  return xs;
}

FaultModel parse_fault_model(const std::string& name) {
  if (name == "none") return FaultModel::none;
  if (name == "hardware") return FaultModel::hardware;
  if (name == "simplified") return FaultModel::simplified;
  throw config_error("unknown fault model '" + name +
                     "' (expected none, hardware, or simplified)");
}

Schedule parse_schedule(const std::string& name) {
  if (name == "layered") return Schedule::layered;
  if (name == "flooding") return Schedule::flooding;
  throw config_error("unknown schedule '" + name +
                     "' (expected layered or flooding)");
}

SearchSpace search_space_of(const RunParams& p) {
  SearchSpace s;
  s.q_min = p.q_min;
  s.q_max = p.q_max;
  s.z_min = p.z_min;
  s.z_max = p.z_max;
  s.z_step = p.z_step;
  s.eps_points = p.eps_points;
  s.eg_min = p.eg_min;
  s.eg_max = p.eg_max;
  s.rounds = p.rounds;
  s.layered_iters = p.iters;
  s.grid_points = p.grid_points;
  return s;
}

nlohmann::json params_json(const RunParams& p) {
  return nlohmann::json{
      {"protograph", p.protograph}, {"tech", p.tech},
      {"snr", p.snr_db},            {"snr-sweep", p.snr_sweep},
      {"q", p.q},                   {"eps", p.eps},
      {"eg", p.eg},                 {"n", p.n_bits},
      {"z", p.z},                   {"alpha", p.alpha},
      {"lambda", p.lambda},         {"iters", p.iters},
      {"seed", p.seed},             {"workers", p.workers},
      {"format", p.format},         {"fault-model", p.fault_model},
      {"schedule", p.schedule},     {"mode", p.mode},
      {"target-pe", p.target_pe},   {"frame-errors", p.frame_errors},
      {"max-frames", p.max_frames}, {"force-full-iters", p.force_full_iters},
      {"q-min", p.q_min},           {"q-max", p.q_max},
      {"z-min", p.z_min},           {"z-max", p.z_max},
      {"z-step", p.z_step},         {"eps-points", p.eps_points},
      {"eg-min", p.eg_min},         {"eg-max", p.eg_max},
      {"rounds", p.rounds},         {"grid-points", p.grid_points}};
}

}  // namespace fqms
