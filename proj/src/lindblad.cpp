#include "spintherm/lindblad.hpp"

#include "spintherm/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace spintherm {

double planck_occupation(double omega, double T) {
  if (!(omega > 0.0)) {
    throw InvalidInput("planck_occupation: frequency must be positive");
  }
  if (T < 0.0) {
    throw InvalidInput("planck_occupation: temperature must be non-negative");
  }
  if (T == 0.0) return 0.0;
  const double x = omega / T;
  if (x > 700.0) return 0.0;  // below 1e-304, indistinguishable from the T=0 bath
  return 1.0 / std::expm1(x);
}

BathRates bath_rates(double omega, double T, double kappa) {
  if (kappa < 0.0) {
    throw InvalidInput("bath_rates: kappa must be non-negative");
  }
  const double n = planck_occupation(omega, T);
  return BathRates{kappa * n, kappa * (n + 1.0)};
}

TransitionTable enumerate_transitions(const Spectrum& spectrum, double eps_zero,
                                      double eps_amp) {
  TransitionTable table;
  for (Spin mu : kSpins) {
    const Matrix8 A = spectrum.transform * pauli_word(mu, Axis::X) *
                      spectrum.transform.transpose();
    auto& list = table.per_reservoir[static_cast<int>(mu)];
    for (int i = 0; i < 8; ++i) {
      for (int j = i + 1; j < 8; ++j) {
        const double freq = spectrum.energies(j) - spectrum.energies(i);
        if (freq <= eps_zero) continue;
        const double amp = A(i, j);
        if (std::abs(amp) < eps_amp) continue;
        list.push_back(Transition{mu, i, j, freq, amp});
      }
    }
  }
  return table;
}

RateMatrix build_rate_matrices(const TransitionTable& table, const ReservoirConfig& reservoirs) {
  for (Spin mu : kSpins) {
    if (reservoirs.temperature(mu) < 0.0) {
      throw InvalidInput(std::string("build_rate_matrices: negative temperature T_") +
                         to_string(mu));
    }
    if (reservoirs.kappa(mu) < 0.0) {
      throw InvalidInput(std::string("build_rate_matrices: negative rate kappa_") +
                         to_string(mu));
    }
  }

  RateMatrix rates;
  double min_spacing = std::numeric_limits<double>::infinity();
  for (Spin mu : kSpins) {
    const double T = reservoirs.temperature(mu);
    const double kappa = reservoirs.kappa(mu);
    Matrix8& M = rates.per_reservoir[static_cast<int>(mu)];
    for (const Transition& t : table.for_reservoir(mu)) {
      min_spacing = std::min(min_spacing, t.frequency);
      if (kappa == 0.0) continue;
      const BathRates r = bath_rates(t.frequency, T, kappa);
      const double a2 = 2.0 * t.amplitude * t.amplitude;
      const double up = a2 * r.absorb;
      const double down = a2 * r.emit;
      M(t.upper, t.lower) += up;
      M(t.lower, t.lower) -= up;
      M(t.lower, t.upper) += down;
      M(t.upper, t.upper) -= down;
    }
  }
  rates.total = rates.per_reservoir[0] + rates.per_reservoir[1] + rates.per_reservoir[2];

  const double kmax = reservoirs.max_kappa();
  if (std::isfinite(min_spacing) && kmax > 0.1 * min_spacing) {
    std::ostringstream msg;
    msg << "secular reduction marginal: max kappa " << kmax
        << " exceeds one tenth of the smallest retained level spacing " << min_spacing;
    rates.diagnostics.push_back(msg.str());
  }
  return rates;
}

}  // namespace spintherm
