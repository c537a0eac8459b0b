#include "spintherm/steadystate.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <sstream>
#include <vector>

namespace spintherm {

namespace {

void validate_populations(const Vector8& p, const char* where) {
  if (p.minCoeff() < -1e-9) {
    throw InvalidInput(std::string(where) + ": populations must be non-negative");
  }
  if (std::abs(p.sum() - 1.0) > 1e-8) {
    throw InvalidInput(std::string(where) + ": populations must sum to one");
  }
}

}  // namespace

int SubspaceDecomposition::component_of(int state) const {
  for (std::size_t c = 0; c < components.size(); ++c) {
    for (int s : components[c]) {
      if (s == state) return static_cast<int>(c);
    }
  }
  throw InvalidInput("component_of: state index outside 0..7");
}

SubspaceDecomposition detect_subspaces(const RateMatrix& rates, double eps_conn) {
  std::array<bool, 8> visited{};
  SubspaceDecomposition dec;
  for (int start = 0; start < 8; ++start) {
    if (visited[start]) continue;
    std::vector<int> comp;
    std::queue<int> frontier;
    frontier.push(start);
    visited[start] = true;
    while (!frontier.empty()) {
      const int i = frontier.front();
      frontier.pop();
      comp.push_back(i);
      for (int j = 0; j < 8; ++j) {
        if (visited[j] || j == i) continue;
        if (std::abs(rates.total(i, j)) > eps_conn || std::abs(rates.total(j, i)) > eps_conn) {
          visited[j] = true;
          frontier.push(j);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    dec.components.push_back(std::move(comp));
  }
  // BFS from ascending start indices already yields components sorted by
  // smallest member.
  return dec;
}

SubspaceDecomposition detect_subspaces(const RateMatrix& rates) {
  return detect_subspaces(rates, 1e-13 * rates.total.cwiseAbs().maxCoeff());
}

Vector8 solve_component(const RateMatrix& rates, const std::vector<int>& component) {
  const int m = static_cast<int>(component.size());
  if (m == 0) throw InvalidInput("solve_component: empty component");

  // R(i,j) = rate from component[i] to component[j] (the generator stores
  // column = source, row = destination).
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      R(i, j) = std::max(rates.total(component[j], component[i]), 0.0);
    }
  }

  // Reachability on strictly positive rates: rounding can leave a component
  // undirected-connected while some states only feed others one-way, so the
  // recurrent set must be found on the directed graph.
  std::vector<std::vector<bool>> reach(m, std::vector<bool>(m, false));
  for (int i = 0; i < m; ++i) {
    reach[i][i] = true;
    std::queue<int> frontier;
    frontier.push(i);
    while (!frontier.empty()) {
      const int u = frontier.front();
      frontier.pop();
      for (int v = 0; v < m; ++v) {
        if (!reach[i][v] && R(u, v) > 0.0) {
          reach[i][v] = true;
          frontier.push(v);
        }
      }
    }
  }

  // Terminal strongly connected classes: every state reachable from a member
  // can reach back. More than one closed class means the stationary state of
  // this component is not unique.
  std::vector<bool> claimed(m, false);
  std::vector<std::vector<int>> terminal_classes;
  for (int i = 0; i < m; ++i) {
    if (claimed[i]) continue;
    bool terminal = true;
    std::vector<int> cls;
    for (int j = 0; j < m; ++j) {
      if (reach[i][j] && !reach[j][i]) {
        terminal = false;
        break;
      }
      if (reach[i][j] && reach[j][i]) cls.push_back(j);
    }
    if (!terminal) continue;
    for (int j : cls) claimed[j] = true;
    terminal_classes.push_back(std::move(cls));
  }
  if (terminal_classes.size() != 1) {
    std::ostringstream msg;
    msg << "solve_component: " << terminal_classes.size()
        << " closed recurrent classes inside one connected component";
    throw DegenerateSteadyState(static_cast<int>(terminal_classes.size()), msg.str());
  }
  const std::vector<int>& cls = terminal_classes.front();
  const int n = static_cast<int>(cls.size());

  Vector8 result = Vector8::Zero();
  if (n == 1) {
    result(component[cls[0]]) = 1.0;
    return result;
  }

  // Grassmann-Taksar-Heyman elimination on the recurrent class. Only
  // additions, multiplications and divisions of non-negative quantities, so
  // the answer is componentwise accurate even when the stationary weights
  // span hundreds of orders of magnitude.
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) G(i, j) = R(cls[i], cls[j]);
  }
  Eigen::VectorXd S = Eigen::VectorXd::Zero(n);
  for (int k = n - 1; k >= 1; --k) {
    S(k) = G.row(k).head(k).sum();
    if (!(S(k) > 0.0)) {
      throw DegenerateSteadyState(
          0, "solve_component: elimination hit a state with no exit rate");
    }
    for (int i = 0; i < k; ++i) {
      if (G(i, k) > 0.0) {
        G.row(i).head(k) += (G(i, k) / S(k)) * G.row(k).head(k);
      }
    }
  }
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  w(0) = 1.0;
  for (int k = 1; k < n; ++k) {
    double acc = 0.0;
    for (int i = 0; i < k; ++i) acc += w(i) * G(i, k);
    w(k) = acc / S(k);
    if (w(k) > 1e280) {
      // Keep the running weights in range; relative sizes are preserved.
      w.head(k + 1) /= w(k);
    }
  }
  w /= w.sum();
  for (int i = 0; i < n; ++i) result(component[cls[i]]) = w(i);
  return result;
}

Vector8 SteadySolution::flattened() const {
  Vector8 p = Vector8::Zero();
  for (std::size_t c = 0; c < component_states.size(); ++c) {
    p += weights[c] * component_states[c];
  }
  return p;
}

Vector8 resolve_initial(const InitialState& initial, const Spectrum& spectrum,
                        const SubspaceDecomposition& decomposition) {
  if (const auto* bare = std::get_if<BareIndexInitial>(&initial)) {
    if (bare->index < 0 || bare->index > 7) {
      throw InvalidInput("resolve_initial: bare index outside 0..7");
    }
    Vector8 p;
    for (int i = 0; i < 8; ++i) {
      const double c = spectrum.transform(i, bare->index);
      p(i) = c * c;
    }
    return p;
  }
  if (const auto* pops = std::get_if<EigenPopulationsInitial>(&initial)) {
    validate_populations(pops->populations, "resolve_initial");
    return pops->populations;
  }
  const auto& frac = std::get<SubspaceFractionInitial>(initial);
  if (!(frac.p >= 0.0 && frac.p <= 1.0)) {
    throw InvalidInput("resolve_initial: subspace fraction must lie in [0, 1]");
  }
  Vector8 p = Vector8::Zero();
  if (decomposition.count() == 1) {
    p.setConstant(1.0 / 8.0);
    return p;
  }
  const int anchor = decomposition.component_of(7);  // top of the spectrum
  const auto& anchor_comp = decomposition.components[anchor];
  const double rest = 8.0 - static_cast<double>(anchor_comp.size());
  for (std::size_t c = 0; c < decomposition.count(); ++c) {
    const auto& comp = decomposition.components[c];
    const double mass = (static_cast<int>(c) == anchor)
                            ? frac.p
                            : (1.0 - frac.p) * static_cast<double>(comp.size()) / rest;
    for (int s : comp) p(s) = mass / static_cast<double>(comp.size());
  }
  return p;
}

SteadySolution steady_state(const RateMatrix& rates, const Vector8& initial_populations,
                            const SubspaceDecomposition& decomposition) {
  validate_populations(initial_populations, "steady_state");
  SteadySolution sol;
  sol.decomposition = decomposition;
  for (const auto& comp : decomposition.components) {
    sol.component_states.push_back(solve_component(rates, comp));
    double w = 0.0;
    for (int s : comp) w += initial_populations(s);
    sol.weights.push_back(std::max(w, 0.0));
  }
  return sol;
}

SteadySolution steady_state(const RateMatrix& rates, const Vector8& initial_populations) {
  return steady_state(rates, initial_populations, detect_subspaces(rates));
}

std::vector<Vector8> evolve(const RateMatrix& rates, const Vector8& initial_populations,
                            const std::vector<double>& times) {
  validate_populations(initial_populations, "evolve");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < 0.0 || (k > 0 && times[k] < times[k - 1])) {
      throw InvalidInput("evolve: times must be non-negative and ascending");
    }
  }
  std::vector<Vector8> states;
  states.reserve(times.size());
  for (double t : times) {
    const Matrix8 propagator = (rates.total * t).exp();
    Vector8 p = propagator * initial_populations;
    for (int i = 0; i < 8; ++i) {
      if (p(i) < 0.0 && p(i) >= -1e-12) p(i) = 0.0;
    }
    states.push_back(p);
  }
  return states;
}

double slowest_relaxation_rate(const RateMatrix& rates) {
  const double scale = rates.total.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  Eigen::EigenSolver<Matrix8> solver(rates.total);
  double slowest = 0.0;
  for (int i = 0; i < 8; ++i) {
    const std::complex<double> lambda = solver.eigenvalues()(i);
    if (std::abs(lambda) <= 1e-12 * scale) continue;  // stationary directions
    const double rate = std::abs(lambda.real());
    if (slowest == 0.0 || rate < slowest) slowest = rate;
  }
  return slowest;
}

}  // namespace spintherm
