#pragma once

#include "spintherm/types.hpp"

#include <array>

namespace spintherm::analytic {

// ---------------------------------------------------------------------------
// Longitudinal field (theta a multiple of pi): the Hamiltonian is diagonal in
// the bare basis and everything is available in closed form.
// ---------------------------------------------------------------------------

// Eigenvalues in bare-basis order |uuu>, |uud>, ..., |ddd> (u = up = bit 0).
std::array<double, 8> lf_eigenvalues(double B_L, double B_M, double B_R, double J_LM,
                                     double J_MR);

// The eight distinct transition frequencies: two per outer reservoir, four for
// the middle one. M1..M4 carry the sign pattern (+,+), (+,-), (-,+), (-,-) of
// (J_LM, J_MR) around B_M.
struct LFFrequencies {
  double L1 = 0.0, L2 = 0.0;
  double M1 = 0.0, M2 = 0.0, M3 = 0.0, M4 = 0.0;
  double R1 = 0.0, R2 = 0.0;
};

LFFrequencies lf_frequencies(double B_L, double B_M, double B_R, double J_LM, double J_MR);

// Steady populations (bare-basis order) for a decoupled middle spin
// (kappa_M = 0). The middle spin's orientation is frozen; p_tilde is the
// conserved probability of the middle-up sector. Requires all four outer
// frequencies positive.
Vector8 lf_steady_kappaM0(double B_L, double B_R, double J_LM, double J_MR,
                          const ReservoirConfig& reservoirs, double p_tilde);

// Closed-form steady currents for the kappa_M = 0 configuration. All three
// vanish identically — the middle spin blocks transport — and the returned
// values are exact floating-point zeros by construction (each current reduces
// to a difference of identical products before evaluation).
HeatCurrents lf_blockade_check(double B_L, double B_R, double J_LM, double J_MR,
                                const ReservoirConfig& reservoirs);

// Uniform-field resonant point B_L = B_M = B_R = J_LM = J_MR = B: the rate
// graph splits and the long-time state depends on the initial sector. For the
// physically natural sector the populations are products of bath factors.
struct DegenerateSteady {
  Vector8 populations;     // bare-basis order, normalized
  HeatCurrents currents;  // exact zeros
};

DegenerateSteady bj_degenerate_steady(double B, const ReservoirConfig& reservoirs);

// ---------------------------------------------------------------------------
// Transverse field (theta an odd multiple of pi/2): the spectrum factors into
// two quartics solvable by radicals.
// ---------------------------------------------------------------------------

// Eight eigenvalues in the closed-form order: indices 0-3 from the
// even-parity family, 4-7 from the odd one. Throws RadicalBranchError if the
// radical chain lands on the wrong branch (residue check against the
// characteristic polynomial). Requires B > 0.
std::array<double, 8> tf_eigenvalues(double B, double J_LM, double J_MR);

// Unit-normalized eigenvector rows in the same closed-form order, expressed
// in the bare basis.
Matrix8 tf_coefficients(double B, double J_LM, double J_MR);

// Matrix element of the local sigma_x of `site` between closed-form
// eigenstates i < j of the same parity family (both < 4 or both >= 4).
double tf_transition_coefficients(const Matrix8& lambda, Spin site, int i, int j);

// Steady populations per parity family (each normalized to 1), computed from
// the closed-form rates via the Markov-chain tree theorem on the 4-state
// block. Index [0] = even family (closed-form rows 0-3), [1] = odd.
std::array<std::array<double, 4>, 2> tf_steady_populations(double B, double J_LM, double J_MR,
                                                           const ReservoirConfig& reservoirs);

// ---------------------------------------------------------------------------
// Bookkeeping between closed-form and numerically sorted level orders.
// ---------------------------------------------------------------------------

// Permutation p with sorted_energies[p[i]] == closed_form[i] within tol.
// Throws InvalidInput if any level cannot be matched uniquely.
std::array<int, 8> match_levels(const std::array<double, 8>& closed_form,
                                const Vector8& sorted_energies, double tol = 1e-9);

// For each eigenvector row, the bare-basis index of its largest component.
std::array<int, 8> dominant_bare_indices(const Matrix8& transform);

}  // namespace spintherm::analytic
