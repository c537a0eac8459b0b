#pragma once

#include "spintherm/lindblad.hpp"
#include "spintherm/types.hpp"

#include <vector>

namespace spintherm {

// Partition of the 8 eigenstates into dynamically connected components of the
// total rate graph (undirected connectivity on |rate| above threshold).
// Components are listed in ascending order of their smallest member.
struct SubspaceDecomposition {
  std::vector<std::vector<int>> components;

  std::size_t count() const { return components.size(); }
  int component_of(int state) const;
};

SubspaceDecomposition detect_subspaces(const RateMatrix& rates, double eps_conn);
// Default threshold: 1e-13 * max |entry| of the total generator.
SubspaceDecomposition detect_subspaces(const RateMatrix& rates);

// Stationary distribution of the generator restricted to one component,
// embedded back into the full 8-vector (zeros elsewhere). Uses
// Grassmann-Taksar-Heyman state elimination: subtraction-free, so entries
// spanning hundreds of orders of magnitude stay componentwise accurate.
// Throws DegenerateSteadyState if the component splits into more than one
// closed recurrent class (the stationary state is then not unique).
Vector8 solve_component(const RateMatrix& rates, const std::vector<int>& component);

struct SteadySolution {
  SubspaceDecomposition decomposition;
  std::vector<Vector8> component_states;  // one per component, unit mass each
  std::vector<double> weights;            // mass assigned to each component

  Vector8 flattened() const;
};

// Resolve an initial-state specification to eigenbasis populations.
//  - BareIndexInitial k: populations |<eig_i|bare_k>|^2.
//  - EigenPopulationsInitial: taken as-is (validated).
//  - SubspaceFractionInitial p: weight p on the component containing the
//    top eigenstate (sorted index 7), remaining 1-p spread over the other
//    components proportionally to their size; uniform within each component.
Vector8 resolve_initial(const InitialState& initial, const Spectrum& spectrum,
                        const SubspaceDecomposition& decomposition);

// Long-time state for the given initial populations: each component keeps its
// initial mass and relaxes to its own stationary distribution.
SteadySolution steady_state(const RateMatrix& rates, const Vector8& initial_populations);
SteadySolution steady_state(const RateMatrix& rates, const Vector8& initial_populations,
                            const SubspaceDecomposition& decomposition);

// Populations at the requested times (ascending, non-negative) under
// d/dt p = M_total p, via dense matrix exponentials.
std::vector<Vector8> evolve(const RateMatrix& rates, const Vector8& initial_populations,
                            const std::vector<double>& times);

// Smallest |Re lambda| over the nonzero spectrum of the total generator;
// the reciprocal sets the slowest relaxation time scale.
double slowest_relaxation_rate(const RateMatrix& rates);

}  // namespace spintherm
