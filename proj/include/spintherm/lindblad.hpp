#pragma once

#include "spintherm/types.hpp"

#include <array>
#include <string>
#include <vector>

namespace spintherm {

// Bose occupation 1/(exp(omega/T) - 1). T == 0 maps to 0, as does omega/T > 700
// (the occupation underflows well before the exponential overflows).
// Requires omega > 0 and T >= 0.
double planck_occupation(double omega, double T);

struct BathRates {
  double absorb = 0.0;  // uphill, proportional to n
  double emit = 0.0;    // downhill, proportional to n + 1
};

// Golden-rule rate pair kappa*n / kappa*(n+1) for one transition frequency.
BathRates bath_rates(double omega, double T, double kappa);

// One allowed eigenbasis transition driven by the transverse coupling of a
// single reservoir. `lower`/`upper` index sorted eigenstates, frequency is
// E_upper - E_lower > 0, amplitude is the corresponding matrix element of the
// rotated local sigma_x.
struct Transition {
  Spin reservoir = Spin::L;
  int lower = 0;
  int upper = 0;
  double frequency = 0.0;
  double amplitude = 0.0;
};

struct TransitionTable {
  std::array<std::vector<Transition>, 3> per_reservoir;

  const std::vector<Transition>& for_reservoir(Spin mu) const {
    return per_reservoir[static_cast<int>(mu)];
  }
  std::size_t total() const {
    return per_reservoir[0].size() + per_reservoir[1].size() + per_reservoir[2].size();
  }
  bool empty() const { return total() == 0; }
};

// Enumerate transitions with frequency > eps_zero and |amplitude| >= eps_amp.
// Transitions at (numerically) zero frequency carry no heat and are dropped.
TransitionTable enumerate_transitions(const Spectrum& spectrum, double eps_zero = 1e-9,
                                      double eps_amp = 1e-12);

// Classical rate generators on the 8 eigenstate populations, one per reservoir
// plus their sum. Columns sum to zero. `diagnostics` collects warnings (e.g.
// when a coupling rate is not small against the retained level spacings, so
// the secular reduction to populations is marginal).
struct RateMatrix {
  std::array<Matrix8, 3> per_reservoir{Matrix8::Zero(), Matrix8::Zero(), Matrix8::Zero()};
  Matrix8 total = Matrix8::Zero();
  std::vector<std::string> diagnostics;

  const Matrix8& reservoir(Spin mu) const { return per_reservoir[static_cast<int>(mu)]; }
};

RateMatrix build_rate_matrices(const TransitionTable& table, const ReservoirConfig& reservoirs);

}  // namespace spintherm
