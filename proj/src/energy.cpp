#include "fqms/energy.hpp"

#include <cmath>

#include "fqms/channel.hpp"
#include "fqms/common.hpp"

namespace fqms {

double TechModel::epsilon_of_eg(double eg) const {
  return eps0 * std::exp(-c * eg);
}

double TechModel::eg_of_epsilon(double eps) const {
  if (!(eps > 0.0))
    throw config_error("fault probability must be positive to invert the "
                       "energy map");
  if (eps >= eps0) {
    if (eps > eps0)
      warn("fault probability above zero-energy level; clamping guard "
           "energy to 0");
    return 0.0;
  }
  return std::log(eps0 / eps) / c;
}

TechModel tech_preset(const std::string& name) {
  if (name == "sram65") return TechModel{};
  throw config_error("unknown technology preset '" + name + "'");
}

double per_iter_bits_per_info_bit(const Protograph& proto, int q) {
  const DegreeProfile deg = proto.degrees();
  double vn_bits = 0.0;
  for (int i = 0; i < proto.n; ++i)
    vn_bits += static_cast<double>(deg.d_v[i]) * (q + deg.q_s);
  double cn_bits = 0.0;
  for (int j = 0; j < proto.m; ++j) cn_bits += 2 * q + deg.d_c[j] - 2;
  const double check_ratio = static_cast<double>(proto.m) / proto.n;
  return (vn_bits + check_ratio * cn_bits) / (proto.n - proto.m);
}

EnergyBreakdown decoding_energy(const Protograph& proto, int q,
                                const TechModel& tech, double eps,
                                double iters) {
  EnergyBreakdown e;
  e.eps = eps;
  e.eg = tech.eg_of_epsilon(eps);
  e.e_bit_pj = tech.bit_energy_pj(e.eg);
  e.bits_per_info_bit = per_iter_bits_per_info_bit(proto, q);
  e.iters = iters;
  e.energy_pj = e.bits_per_info_bit * e.e_bit_pj * iters;
  return e;
}

}  // namespace fqms
