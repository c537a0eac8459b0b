#pragma once

#include "spintherm/types.hpp"

namespace spintherm {

/// Pauli operator on one site tensored with identities on the others, in the
/// bare basis (L = most significant bit, up = 0).  Axis::Y returns the real
/// companion matrix y~ = [[0,1],[-1,0]] (sigma_y = i y~); products
/// sigma_y sigma_y = -(y~ y~) therefore stay real, which keeps every
/// Hamiltonian in this family real symmetric.
Matrix8 pauli_word(Spin label, Axis axis);

/// H = 1/2 sum_mu B_mu (sin(theta) sx_mu + cos(theta) sz_mu)
///     + sum_{(L,M),(M,R)} (J/2) (g_x sx sx + g_y sy sy + g_z sz sz).
Matrix8 build_hamiltonian(const FieldConfig& fields, const CouplingConfig& coupling);

/// Dense symmetric eigendecomposition with deterministic conventions:
///  - eigenvalues ascending,
///  - inside a degenerate group, rows ordered by their dominant bare
///    component (all physical outputs are tie-break independent),
///  - each eigenvector's first non-negligible component made positive.
/// Throws InvalidInput when H fails the symmetry check.
Spectrum diagonalize(const Matrix8& H);

}  // namespace spintherm
