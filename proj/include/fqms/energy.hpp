#pragma once

#include <string>

#include "fqms/protograph.hpp"

namespace fqms {

// Memory technology operating point: scaling the per-bit write energy by a
// guard factor e_g trades energy for an exponentially growing per-bit fault
// probability eps(e_g) = eps0 * exp(-c * e_g).  e_g = 1 is the nominal
// (essentially reliable) point.
struct TechModel {
  std::string name = "sram65";
  double eps0 = 0.5;
  double c = 12.0;
  double e0_pj = 0.156;  // bit write energy at e_g = 1, picojoule

  double epsilon_of_eg(double eg) const;
  // Inverse map; eps above eps0 clamps to e_g = 0 with a warning, eps <= 0
  // is rejected.
  double eg_of_epsilon(double eps) const;
  double bit_energy_pj(double eg) const { return eg * e0_pj; }
};

TechModel tech_preset(const std::string& name);

// Memory bits written per information bit per decoding iteration: each of
// the d_v posterior updates of a variable node stores q + q_s bits, and
// each check node stores its two surviving magnitudes plus one sign per
// edge (2q + d_c - 2 bits), weighted by the check/variable ratio.
double per_iter_bits_per_info_bit(const Protograph& proto, int q);

struct EnergyBreakdown {
  double eg = 0.0;
  double eps = 0.0;
  double e_bit_pj = 0.0;
  double bits_per_info_bit = 0.0;
  double iters = 0.0;
  double energy_pj = 0.0;  // per information bit
};

// Expected decoding energy per information bit at fault level eps and
// expected iteration count iters.
EnergyBreakdown decoding_energy(const Protograph& proto, int q,
                                const TechModel& tech, double eps,
                                double iters);

}  // namespace fqms
