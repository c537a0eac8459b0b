#pragma once

#include "spintherm/lindblad.hpp"
#include "spintherm/steadystate.hpp"
#include "spintherm/types.hpp"

#include <string>
#include <vector>

namespace spintherm {

// Q_mu = omega^T M_mu p: energy flow from reservoir mu into the system.
HeatCurrents heat_currents(const RateMatrix& rates, const Spectrum& spectrum,
                           const Vector8& populations);

// Same contraction applied to every sample of a transient trajectory. At
// finite times the three currents need not sum to zero (the system's mean
// energy is still changing).
std::vector<HeatCurrents> transient_currents(const RateMatrix& rates, const Spectrum& spectrum,
                                             const std::vector<Vector8>& trajectory);

// Full steady-state pipeline for one configuration.
struct SteadyPoint {
  Spectrum spectrum;
  TransitionTable table;
  RateMatrix rates;
  SteadySolution solution;
  HeatCurrents currents;
};

SteadyPoint solve_steady_point(const SystemConfig& config);

// Finite-difference response of the steady currents to the middle-reservoir
// temperature: alpha_mu = dQ_mu/dQ_M. `defined` is false when dQ_M/dT_M is
// numerically zero, in which case the gains are meaningless and set to 0.
struct AmplificationResult {
  double alpha_L = 0.0;
  double alpha_R = 0.0;
  double dQM_dTM = 0.0;
  bool defined = false;
};

AmplificationResult amplification(const SystemConfig& config, double T_M, double dT);

// Current asymmetry under exchanging the left and right bath temperatures.
// R = |Q_fwd + Q_rev| / max(|Q_fwd|, |Q_rev|); R = 0 when both currents are
// below the numerical floor, R -> 1 for a perfect one-way valve.
struct RectificationResult {
  double Q_forward = 0.0;
  double Q_reverse = 0.0;
  double R = 0.0;
  bool middle_coupled = false;
};

RectificationResult rectification(const SystemConfig& config);

// How the initial condition tracks along a sweep: carry the relaxed
// populations of the previous point through the change of eigenbasis, or
// resolve the configured initial state freshly at every point.
enum class InitialPolicy { CarryPrevious, FixedP };

struct SweepRow {
  double value = 0.0;  // the swept parameter (theta or T_M)
  HeatCurrents currents;
  int components = 1;
  std::string flag;  // empty, or "decoupled:..." with per-component currents
};

std::vector<SweepRow> theta_sweep(const SystemConfig& config, const std::vector<double>& thetas,
                                  InitialPolicy policy = InitialPolicy::CarryPrevious,
                                  unsigned threads = 0);

struct TmSweepResult {
  std::vector<SweepRow> rows;
  std::vector<double> critical_temperatures;  // sign changes of Q_M, bisected to 1e-6
};

TmSweepResult tm_sweep(const SystemConfig& config, const std::vector<double>& T_Ms,
                       unsigned threads = 0);

}  // namespace spintherm
