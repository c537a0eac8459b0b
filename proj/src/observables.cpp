#include "spintherm/observables.hpp"

#include "spintherm/model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace spintherm {

namespace {

// Index-parallel loop with first-exception propagation. threads == 0 picks
// the hardware concurrency; the loop degrades to serial for tiny workloads.
template <typename Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
  unsigned workers = threads;
  if (workers == 0) {
    workers = std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
  }
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex guard;
  std::exception_ptr error;
  auto run = [&]() {
    while (!stop.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(guard);
        if (!error) error = std::current_exception();
        stop.store(true, std::memory_order_relaxed);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::string fmt9(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

// Everything about one configuration that does not depend on the initial
// state: spectrum, rates, invariant components, and the per-component steady
// states with their currents (currents are linear in the populations, so the
// combined currents are the weight-mixture of the per-component ones).
struct PointParts {
  Spectrum spectrum;
  TransitionTable table;
  RateMatrix rates;
  SubspaceDecomposition decomposition;
  std::vector<Vector8> component_states;
  std::vector<HeatCurrents> component_currents;
};

PointParts compute_parts(const SystemConfig& config) {
  PointParts parts;
  parts.spectrum = diagonalize(build_hamiltonian(config.fields, config.coupling));
  parts.table = enumerate_transitions(parts.spectrum, config.tolerances.eps_zero,
                                      config.tolerances.eps_amp);
  parts.rates = build_rate_matrices(parts.table, config.reservoirs);
  parts.decomposition = config.tolerances.eps_conn
                            ? detect_subspaces(parts.rates, *config.tolerances.eps_conn)
                            : detect_subspaces(parts.rates);
  for (const auto& comp : parts.decomposition.components) {
    parts.component_states.push_back(solve_component(parts.rates, comp));
    parts.component_currents.push_back(
        heat_currents(parts.rates, parts.spectrum, parts.component_states.back()));
  }
  return parts;
}

std::vector<double> component_weights(const SubspaceDecomposition& dec, const Vector8& p) {
  std::vector<double> w;
  w.reserve(dec.count());
  for (const auto& comp : dec.components) {
    double mass = 0.0;
    for (int s : comp) mass += p(s);
    w.push_back(std::max(mass, 0.0));
  }
  return w;
}

HeatCurrents mix_currents(const std::vector<HeatCurrents>& per_component,
                          const std::vector<double>& weights) {
  HeatCurrents q;
  for (std::size_t c = 0; c < per_component.size(); ++c) {
    q.Q_L += weights[c] * per_component[c].Q_L;
    q.Q_M += weights[c] * per_component[c].Q_M;
    q.Q_R += weights[c] * per_component[c].Q_R;
  }
  return q;
}

std::string decoupled_flag(const std::vector<HeatCurrents>& per_component) {
  std::string flag = "decoupled:";
  for (std::size_t c = 0; c < per_component.size(); ++c) {
    if (c > 0) flag += ';';
    flag += fmt9(per_component[c].Q_L) + "|" + fmt9(per_component[c].Q_M) + "|" +
            fmt9(per_component[c].Q_R);
  }
  return flag;
}

}  // namespace

HeatCurrents heat_currents(const RateMatrix& rates, const Spectrum& spectrum,
                           const Vector8& populations) {
  HeatCurrents q;
  q.Q_L = spectrum.energies.dot(rates.reservoir(Spin::L) * populations);
  q.Q_M = spectrum.energies.dot(rates.reservoir(Spin::M) * populations);
  q.Q_R = spectrum.energies.dot(rates.reservoir(Spin::R) * populations);
  return q;
}

std::vector<HeatCurrents> transient_currents(const RateMatrix& rates, const Spectrum& spectrum,
                                             const std::vector<Vector8>& trajectory) {
  std::vector<HeatCurrents> out;
  out.reserve(trajectory.size());
  for (const Vector8& p : trajectory) out.push_back(heat_currents(rates, spectrum, p));
  return out;
}

SteadyPoint solve_steady_point(const SystemConfig& config) {
  PointParts parts = compute_parts(config);
  const Vector8 p0 = resolve_initial(config.initial, parts.spectrum, parts.decomposition);

  SteadyPoint point;
  point.spectrum = parts.spectrum;
  point.table = std::move(parts.table);
  point.rates = std::move(parts.rates);
  point.solution.decomposition = std::move(parts.decomposition);
  point.solution.component_states = std::move(parts.component_states);
  point.solution.weights = component_weights(point.solution.decomposition, p0);
  point.currents = mix_currents(parts.component_currents, point.solution.weights);
  return point;
}

AmplificationResult amplification(const SystemConfig& config, double T_M, double dT) {
  if (!(dT > 0.0)) throw InvalidInput("amplification: dT must be positive");
  if (!(T_M - dT > 0.0)) {
    throw InvalidInput("amplification: T_M - dT must stay positive");
  }
  SystemConfig upper = config;
  upper.reservoirs.T_M = T_M + dT;
  SystemConfig lower = config;
  lower.reservoirs.T_M = T_M - dT;
  const HeatCurrents qu = solve_steady_point(upper).currents;
  const HeatCurrents ql = solve_steady_point(lower).currents;

  const double dQL = qu.Q_L - ql.Q_L;
  const double dQM = qu.Q_M - ql.Q_M;
  const double dQR = qu.Q_R - ql.Q_R;

  AmplificationResult result;
  result.dQM_dTM = dQM / (2.0 * dT);
  // The gains are ratios of finite differences; once the base-current
  // response drops far below the terminal responses (or vanishes outright)
  // they are pure noise.
  result.defined = std::abs(dQM) > 0.0 && std::abs(dQM) >= 1e-6 * (std::abs(dQL) + std::abs(dQR));
  if (result.defined) {
    result.alpha_L = dQL / dQM;
    result.alpha_R = dQR / dQM;
  }
  return result;
}

RectificationResult rectification(const SystemConfig& config) {
  SystemConfig reversed = config;
  std::swap(reversed.reservoirs.T_L, reversed.reservoirs.T_R);

  RectificationResult result;
  result.middle_coupled = config.reservoirs.kappa_M > 0.0;
  result.Q_forward = solve_steady_point(config).currents.Q_L;
  result.Q_reverse = solve_steady_point(reversed).currents.Q_L;

  const double floor = 1e-15 * config.reservoirs.max_kappa();
  if (std::abs(result.Q_forward) < floor && std::abs(result.Q_reverse) < floor) {
    result.R = 0.0;
  } else {
    result.R = std::abs(result.Q_forward + result.Q_reverse) /
               std::max(std::abs(result.Q_forward), std::abs(result.Q_reverse));
  }
  return result;
}

std::vector<SweepRow> theta_sweep(const SystemConfig& config, const std::vector<double>& thetas,
                                  InitialPolicy policy, unsigned threads) {
  if (thetas.empty()) throw InvalidInput("theta_sweep: empty grid");
  for (std::size_t k = 1; k < thetas.size(); ++k) {
    if (!(thetas[k] > thetas[k - 1])) {
      throw InvalidInput("theta_sweep: grid must be strictly ascending");
    }
  }

  std::vector<PointParts> parts(thetas.size());
  parallel_for(thetas.size(), threads, [&](std::size_t k) {
    SystemConfig local = config;
    local.fields.theta = thetas[k];
    parts[k] = compute_parts(local);
  });

  // The initial weights thread sequentially through the sweep: either carried
  // from the previous point's relaxed populations (re-expressed in the new
  // eigenbasis via the squared-overlap matrix, which preserves total mass) or
  // resolved afresh at every point.
  std::vector<SweepRow> rows;
  rows.reserve(thetas.size());
  Vector8 prev_steady = Vector8::Zero();
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    const PointParts& pt = parts[k];
    Vector8 p_init;
    if (k == 0 || policy == InitialPolicy::FixedP) {
      p_init = resolve_initial(config.initial, pt.spectrum, pt.decomposition);
    } else {
      const Matrix8 overlap = pt.spectrum.transform * parts[k - 1].spectrum.transform.transpose();
      p_init = overlap.cwiseProduct(overlap) * prev_steady;
    }
    const std::vector<double> weights = component_weights(pt.decomposition, p_init);

    prev_steady.setZero();
    for (std::size_t c = 0; c < weights.size(); ++c) {
      prev_steady += weights[c] * pt.component_states[c];
    }

    SweepRow row;
    row.value = thetas[k];
    row.currents = mix_currents(pt.component_currents, weights);
    row.components = static_cast<int>(pt.decomposition.count());
    if (row.components > 1) row.flag = decoupled_flag(pt.component_currents);
    rows.push_back(std::move(row));
  }
  return rows;
}

TmSweepResult tm_sweep(const SystemConfig& config, const std::vector<double>& T_Ms,
                       unsigned threads) {
  if (T_Ms.empty()) throw InvalidInput("tm_sweep: empty grid");
  for (double t : T_Ms) {
    if (!(t > 0.0)) throw InvalidInput("tm_sweep: temperatures must be positive");
  }
  bool ascending = true, descending = true;
  for (std::size_t k = 1; k < T_Ms.size(); ++k) {
    if (!(T_Ms[k] > T_Ms[k - 1])) ascending = false;
    if (!(T_Ms[k] < T_Ms[k - 1])) descending = false;
  }
  if (!ascending && !descending) {
    throw InvalidInput("tm_sweep: grid must be strictly monotone");
  }

  TmSweepResult result;
  result.rows.resize(T_Ms.size());
  parallel_for(T_Ms.size(), threads, [&](std::size_t k) {
    SystemConfig local = config;
    local.reservoirs.T_M = T_Ms[k];
    const SteadyPoint point = solve_steady_point(local);
    SweepRow row;
    row.value = T_Ms[k];
    row.currents = point.currents;
    row.components = static_cast<int>(point.solution.decomposition.count());
    if (row.components > 1) {
      std::vector<HeatCurrents> per_component;
      for (const Vector8& state : point.solution.component_states) {
        per_component.push_back(heat_currents(point.rates, point.spectrum, state));
      }
      row.flag = decoupled_flag(per_component);
    }
    result.rows[k] = std::move(row);
  });

  // Scan the ascending view for sign reversals of the base current and pin
  // each critical temperature by bisection.
  auto q_m_at = [&](double T) {
    SystemConfig local = config;
    local.reservoirs.T_M = T;
    return solve_steady_point(local).currents.Q_M;
  };
  const std::size_t n = T_Ms.size();
  for (std::size_t a = 0; a + 1 < n; ++a) {
    const std::size_t i = ascending ? a : n - 1 - a;       // lower-T row
    const std::size_t j = ascending ? a + 1 : n - 2 - a;   // upper-T row
    const double qa = result.rows[i].currents.Q_M;
    const double qb = result.rows[j].currents.Q_M;
    if (!(qa * qb < 0.0)) continue;
    double lo = result.rows[i].value, hi = result.rows[j].value;
    double flo = qa;
    while (hi - lo > 1e-6) {
      const double mid = 0.5 * (lo + hi);
      const double fmid = q_m_at(mid);
      if (fmid == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((fmid > 0.0) == (flo > 0.0)) {
        lo = mid;
        flo = fmid;
      } else {
        hi = mid;
      }
    }
    const double tc = 0.5 * (lo + hi);
    result.critical_temperatures.push_back(tc);
    SweepRow& upper_row = result.rows[j];
    if (!upper_row.flag.empty()) upper_row.flag += ';';
    upper_row.flag += "QM-sign-change;Tc=" + fmt9(tc);
  }
  std::sort(result.critical_temperatures.begin(), result.critical_temperatures.end());
  return result;
}

}  // namespace spintherm
