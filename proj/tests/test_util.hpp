#pragma once

#include "spintherm/types.hpp"

#include <cmath>
#include <random>

namespace testutil {

using namespace spintherm;

// A configuration away from all symmetry points: skew field angle, distinct
// fields and couplings, every reservoir attached. Such systems have a single
// connected component and a unique steady state.
inline SystemConfig generic_config(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> field(0.5, 3.0);
  std::uniform_real_distribution<double> angle(0.2, 1.3);
  std::uniform_real_distribution<double> coupling(0.2, 2.0);
  std::uniform_real_distribution<double> temp(0.1, 2.0);
  std::uniform_real_distribution<double> rate(1e-4, 5e-3);
  SystemConfig c;
  c.fields.B_L = field(rng);
  c.fields.B_M = field(rng);
  c.fields.B_R = field(rng);
  c.fields.theta = angle(rng);
  c.coupling.J_LM = coupling(rng);
  c.coupling.J_MR = coupling(rng);
  c.reservoirs.T_L = temp(rng);
  c.reservoirs.T_M = temp(rng);
  c.reservoirs.T_R = temp(rng);
  c.reservoirs.kappa_L = rate(rng);
  c.reservoirs.kappa_M = rate(rng);
  c.reservoirs.kappa_R = rate(rng);
  return c;
}

inline Vector8 gibbs(const Vector8& energies, double T) {
  Vector8 g;
  for (int i = 0; i < 8; ++i) g(i) = std::exp(-energies(i) / T);
  return g / g.sum();
}

inline double current_scale(const HeatCurrents& q, const ReservoirConfig& res,
                            const FieldConfig& fields) {
  const double b0 = std::max({std::abs(fields.B_L), std::abs(fields.B_M),
                              std::abs(fields.B_R)});
  return std::max({std::abs(q.Q_L), std::abs(q.Q_M), std::abs(q.Q_R),
                   res.max_kappa() * b0 * b0});
}

}  // namespace testutil
