#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "spintherm/analytic.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "spintherm/lindblad.hpp"
#include "spintherm/model.hpp"
#include "spintherm/steadystate.hpp"
#include "test_util.hpp"

using namespace spintherm;
namespace an = spintherm::analytic;

namespace {
const double kPi = std::acos(-1.0);

// Random longitudinal configuration with all outer transition frequencies
// safely positive (B - J >= 0.05 on both bonds).
SystemConfig lf_draw(std::mt19937_64& rng, bool tall_middle = false) {
  std::uniform_real_distribution<double> field(0.5, 3.0);
  std::uniform_real_distribution<double> temp(0.1, 2.0);
  std::uniform_real_distribution<double> rate(1e-4, 5e-3);
  SystemConfig c;
  c.fields.B_L = field(rng);
  c.fields.B_M = field(rng);
  c.fields.B_R = field(rng);
  c.fields.theta = 0.0;
  std::uniform_real_distribution<double> jl(0.05, c.fields.B_L - 0.05);
  std::uniform_real_distribution<double> jr(0.05, c.fields.B_R - 0.05);
  c.coupling.J_LM = jl(rng);
  c.coupling.J_MR = jr(rng);
  if (tall_middle) {
    // Keep every middle-reservoir frequency positive as well.
    std::uniform_real_distribution<double> lift(0.05, 2.0);
    c.fields.B_M = c.coupling.J_LM + c.coupling.J_MR + lift(rng);
  }
  c.reservoirs.T_L = temp(rng);
  c.reservoirs.T_M = temp(rng);
  c.reservoirs.T_R = temp(rng);
  c.reservoirs.kappa_L = rate(rng);
  c.reservoirs.kappa_M = 0.0;
  c.reservoirs.kappa_R = rate(rng);
  return c;
}
}  // namespace

TEST_CASE("longitudinal eigenvalues in bare order match the diagonal Hamiltonian") {
  const std::array<double, 8> w = an::lf_eigenvalues(1.0, 1.0, 1.0, 0.5, 0.1);
  CHECK(w[0] == doctest::Approx(1.8).epsilon(1e-14));   // |uuu>
  CHECK(w[5] == doctest::Approx(-0.8).epsilon(1e-14));  // |dud>
  CHECK(w[7] == doctest::Approx(-1.2).epsilon(1e-14));  // |ddd>

  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const SystemConfig c = lf_draw(rng);
    const Matrix8 H = build_hamiltonian(c.fields, c.coupling);
    const std::array<double, 8> lev = an::lf_eigenvalues(
        c.fields.B_L, c.fields.B_M, c.fields.B_R, c.coupling.J_LM, c.coupling.J_MR);
    double sum = 0.0;
    for (int b = 0; b < 8; ++b) {
      CHECK(lev[b] == doctest::Approx(H(b, b)).epsilon(1e-13));
      sum += lev[b];
    }
    CHECK(std::abs(sum) < 1e-12);
  }
}

TEST_CASE("longitudinal transition frequencies match the enumerated table") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const SystemConfig c = lf_draw(rng, /*tall_middle=*/true);
    const an::LFFrequencies f = an::lf_frequencies(
        c.fields.B_L, c.fields.B_M, c.fields.B_R, c.coupling.J_LM, c.coupling.J_MR);
    const Spectrum spec = diagonalize(build_hamiltonian(c.fields, c.coupling));
    const TransitionTable table = enumerate_transitions(spec);

    auto freqs = [&](Spin s) {
      std::vector<double> out;
      for (const Transition& t : table.for_reservoir(s)) out.push_back(t.frequency);
      std::sort(out.begin(), out.end());
      return out;
    };
    auto expect = [&](std::vector<double> want, Spin s) {
      std::sort(want.begin(), want.end());
      const std::vector<double> got = freqs(s);
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
      }
    };
    expect({f.L1, f.L1, f.L2, f.L2}, Spin::L);
    expect({f.M1, f.M2, f.M3, f.M4}, Spin::M);
    expect({f.R1, f.R1, f.R2, f.R2}, Spin::R);
  }
}

TEST_CASE("closed-form steady state of the blocked chain matches the solver") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> pdist(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const SystemConfig c = lf_draw(rng);
    const double p = pdist(rng);

    const Spectrum spec = diagonalize(build_hamiltonian(c.fields, c.coupling));
    const RateMatrix rates = build_rate_matrices(enumerate_transitions(spec), c.reservoirs);
    const SubspaceDecomposition dec = detect_subspaces(rates);
    const Vector8 p0 = resolve_initial(SubspaceFractionInitial{p}, spec, dec);
    const Vector8 numeric = steady_state(rates, p0, dec).flattened();

    const Vector8 closed = an::lf_steady_kappaM0(c.fields.B_L, c.fields.B_R,
                                                 c.coupling.J_LM, c.coupling.J_MR,
                                                 c.reservoirs, p);
    // Numeric populations are in sorted-eigenvalue order; the closed form is
    // in bare order. The transform is a permutation at theta = 0.
    const std::array<int, 8> bare = an::dominant_bare_indices(spec.transform);
    for (int i = 0; i < 8; ++i) {
      worst = std::max(worst, std::abs(numeric(i) - closed(bare[i])));
    }
  }
  CHECK(worst < 1e-10);
  MESSAGE("worst population deviation: ", worst);
}

TEST_CASE("closed-form blockade currents are exact zeros") {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 20; ++trial) {
    const SystemConfig c = lf_draw(rng);
    const HeatCurrents q = an::lf_blockade_check(c.fields.B_L, c.fields.B_R,
                                                 c.coupling.J_LM, c.coupling.J_MR,
                                                 c.reservoirs);
    CHECK(q.Q_L == 0.0);
    CHECK(q.Q_M == 0.0);
    CHECK(q.Q_R == 0.0);
  }
  ReservoirConfig bad;
  bad.T_L = 1.0;
  bad.T_M = 1.0;
  bad.T_R = 1.0;
  bad.kappa_L = 0.0;  // outer reservoirs must be attached
  bad.kappa_R = 1e-3;
  CHECK_THROWS_AS(an::lf_blockade_check(1.0, 1.0, 0.5, 0.1, bad), InvalidInput);
}

TEST_CASE("resonant-point product state matches the elimination solver") {
  for (double B : {0.1, 10.0}) {
    ReservoirConfig res;
    res.T_L = 2.0;
    res.T_M = 0.02;
    res.T_R = 0.2;
    res.kappa_L = res.kappa_M = res.kappa_R = 1e-3;
    const an::DegenerateSteady closed = an::bj_degenerate_steady(B, res);

    CHECK(closed.populations.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(closed.populations.minCoeff() >= 0.0);
    CHECK(closed.currents.Q_L == 0.0);
    CHECK(closed.currents.Q_M == 0.0);
    CHECK(closed.currents.Q_R == 0.0);

    SystemConfig c;
    c.fields = {B, B, B, 0.0};
    c.coupling.J_LM = B;
    c.coupling.J_MR = B;
    c.reservoirs = res;
    const Spectrum spec = diagonalize(build_hamiltonian(c.fields, c.coupling));
    const RateMatrix rates = build_rate_matrices(enumerate_transitions(spec), c.reservoirs);
    const SubspaceDecomposition dec = detect_subspaces(rates);
    const std::array<int, 8> bare = an::dominant_bare_indices(spec.transform);

    // The resonant graph leaves several levels isolated; compare on the
    // connected component that carries the product-form state.
    for (const auto& comp : dec.components) {
      if (comp.size() < 2) continue;
      const Vector8 numeric = solve_component(rates, comp);
      double mass = 0.0;
      for (int i : comp) mass += closed.populations(bare[i]);
      REQUIRE(mass > 0.0);
      for (int i : comp) {
        const double want = closed.populations(bare[i]) / mass;
        if (want > 1e-280) {
          CHECK(numeric(i) / want == doctest::Approx(1.0).epsilon(1e-9));
        } else {
          CHECK(numeric(i) <= 1e-280);
        }
      }
    }
  }
  ReservoirConfig res;
  res.T_L = res.T_M = res.T_R = 1.0;
  res.kappa_L = res.kappa_M = res.kappa_R = 1e-3;
  CHECK_THROWS_AS(an::bj_degenerate_steady(-1.0, res), InvalidInput);
}

TEST_CASE("transverse eigenvalues by radicals match the dense solver") {
  std::mt19937_64 rng(45);
  std::uniform_real_distribution<double> field(0.5, 3.0);
  std::uniform_real_distribution<double> coupling(0.2, 2.0);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const double B = field(rng), jl = coupling(rng), jr = coupling(rng);
    const std::array<double, 8> w = an::tf_eigenvalues(B, jl, jr);

    FieldConfig fields{B, B, B, kPi / 2};
    CouplingConfig cpl;
    cpl.J_LM = jl;
    cpl.J_MR = jr;
    const Spectrum spec = diagonalize(build_hamiltonian(fields, cpl));

    std::array<double, 8> sorted = w;
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (int i = 0; i < 8; ++i) {
      worst = std::max(worst, std::abs(sorted[i] - spec.energies(i)));
      sum += w[i];
    }
    CHECK(std::abs(sum) < 1e-10);
  }
  CHECK(worst < 1e-8);
  MESSAGE("worst eigenvalue deviation: ", worst);

  // Example case with both couplings distinct.
  const std::array<double, 8> w = an::tf_eigenvalues(1.5, 0.8, 1.2);
  FieldConfig fields{1.5, 1.5, 1.5, kPi / 2};
  CouplingConfig cpl;
  cpl.J_LM = 0.8;
  cpl.J_MR = 1.2;
  const Spectrum spec = diagonalize(build_hamiltonian(fields, cpl));
  std::array<double, 8> sorted = w;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 8; ++i) {
    CHECK(sorted[i] == doctest::Approx(spec.energies(i)).epsilon(1e-10));
  }

  CHECK_THROWS_AS(an::tf_eigenvalues(-1.0, 0.5, 0.5), InvalidInput);
}

TEST_CASE("transverse eigenvector rows diagonalize the Hamiltonian") {
  std::mt19937_64 rng(46);
  std::uniform_real_distribution<double> field(0.5, 3.0);
  std::uniform_real_distribution<double> coupling(0.2, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double B = field(rng), jl = coupling(rng), jr = coupling(rng);
    const std::array<double, 8> w = an::tf_eigenvalues(B, jl, jr);
    const Matrix8 lambda = an::tf_coefficients(B, jl, jr);

    FieldConfig fields{B, B, B, kPi / 2};
    CouplingConfig cpl;
    cpl.J_LM = jl;
    cpl.J_MR = jr;
    const Matrix8 H = build_hamiltonian(fields, cpl);

    for (int i = 0; i < 8; ++i) {
      CHECK(lambda.row(i).norm() == doctest::Approx(1.0).epsilon(1e-9));
      const double residual = (lambda.row(i) * H - w[i] * lambda.row(i)).norm();
      CHECK(residual < 1e-8);
    }
    const Matrix8 gram = lambda * lambda.transpose();
    CHECK((gram - Matrix8::Identity()).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("transverse transition elements agree with the explicit contraction") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> field(0.5, 3.0);
  std::uniform_real_distribution<double> coupling(0.2, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double B = field(rng), jl = coupling(rng), jr = coupling(rng);
    const Matrix8 lambda = an::tf_coefficients(B, jl, jr);
    for (Spin site : kSpins) {
      const Matrix8 X = pauli_word(site, Axis::X);
      for (int fam = 0; fam < 2; ++fam) {
        for (int i = 4 * fam; i < 4 * fam + 4; ++i) {
          for (int j = i + 1; j < 4 * fam + 4; ++j) {
            const double direct = (lambda.row(i) * X * lambda.row(j).transpose()).value();
            const double closed = an::tf_transition_coefficients(lambda, site, i, j);
            CHECK(closed == doctest::Approx(direct).epsilon(1e-9));
          }
        }
      }
    }
  }
  const Matrix8 lambda = an::tf_coefficients(1.5, 0.8, 1.2);
  CHECK_THROWS_AS(an::tf_transition_coefficients(lambda, Spin::L, 1, 5), InvalidInput);
  CHECK_THROWS_AS(an::tf_transition_coefficients(lambda, Spin::L, 3, 3), InvalidInput);
}

TEST_CASE("transverse steady families match the per-component solver") {
  std::mt19937_64 rng(48);
  std::uniform_real_distribution<double> field(0.5, 3.0);
  std::uniform_real_distribution<double> coupling(0.2, 2.0);
  std::uniform_real_distribution<double> temp(0.1, 2.0);
  std::uniform_real_distribution<double> rate(1e-4, 5e-3);
  double worst = 0.0;
  int used = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const double B = field(rng), jl = coupling(rng), jr = coupling(rng);
    ReservoirConfig res;
    res.T_L = temp(rng);
    res.T_M = temp(rng);
    res.T_R = temp(rng);
    res.kappa_L = rate(rng);
    res.kappa_M = rate(rng);
    res.kappa_R = rate(rng);

    const std::array<double, 8> w = an::tf_eigenvalues(B, jl, jr);
    double min_gap = 1e300;
    for (int i = 0; i < 8; ++i) {
      for (int j = i + 1; j < 8; ++j) min_gap = std::min(min_gap, std::abs(w[i] - w[j]));
    }
    if (min_gap < 1e-6) continue;  // near-degenerate draws have no stable split
    ++used;

    FieldConfig fields{B, B, B, kPi / 2};
    CouplingConfig cpl;
    cpl.J_LM = jl;
    cpl.J_MR = jr;
    const Spectrum spec = diagonalize(build_hamiltonian(fields, cpl));
    const RateMatrix rates = build_rate_matrices(enumerate_transitions(spec), res);
    const SubspaceDecomposition dec = detect_subspaces(rates);
    REQUIRE(dec.count() == 2);

    const auto closed = an::tf_steady_populations(B, jl, jr, res);
    const std::array<int, 8> perm = an::match_levels(w, spec.energies);
    for (int fam = 0; fam < 2; ++fam) {
      const int rep = perm[4 * fam];
      const auto& comp = dec.components[dec.component_of(rep)];
      const Vector8 numeric = solve_component(rates, comp);
      for (int k = 0; k < 4; ++k) {
        worst = std::max(worst, std::abs(numeric(perm[4 * fam + k]) - closed[fam][k]));
      }
    }
  }
  CHECK(used >= 40);
  CHECK(worst < 1e-8);
  MESSAGE("worst family population deviation: ", worst, " over ", used, " draws");
}

TEST_CASE("level matching between closed-form and sorted orders") {
  const std::array<double, 8> closed = {3.0, -1.0, 2.0, 0.5, -2.0, 1.0, -0.5, 0.0};
  Vector8 sorted;
  sorted << -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0;
  const std::array<int, 8> perm = an::match_levels(closed, sorted);
  for (int i = 0; i < 8; ++i) {
    CHECK(sorted(perm[i]) == doctest::Approx(closed[i]).epsilon(1e-14));
  }

  std::array<double, 8> shifted = closed;
  shifted[3] += 0.1;  // outside tolerance of any sorted level
  CHECK_THROWS_AS(an::match_levels(shifted, sorted), InvalidInput);

  std::array<double, 8> collided = closed;
  collided[3] = -1.0;  // two closed-form levels claim the same sorted slot
  CHECK_THROWS_AS(an::match_levels(collided, sorted), InvalidInput);
}

TEST_CASE("dominant bare indices form a permutation for permutation-like transforms") {
  std::mt19937_64 rng(49);
  const SystemConfig c = lf_draw(rng);
  const Spectrum spec = diagonalize(build_hamiltonian(c.fields, c.coupling));
  const std::array<int, 8> bare = an::dominant_bare_indices(spec.transform);
  std::array<bool, 8> seen{};
  for (int i = 0; i < 8; ++i) {
    CHECK(!seen[bare[i]]);
    seen[bare[i]] = true;
  }
}
