#include "spintherm/analytic.hpp"

#include "spintherm/lindblad.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <utility>

namespace spintherm::analytic {

namespace {

using cplx = std::complex<double>;

// Nested radicals shared by one quartic family (fixed sign of the cubic
// coefficient d). Everything is evaluated in complex arithmetic with
// principal branches; intermediate values may be genuinely complex even
// though the final eigenvalues are real.
struct FamilyRadicals {
  cplx m2;
  cplx m3_t_minus;  // second sign choice t = -
  cplx m3_t_plus;   // second sign choice t = +
};

FamilyRadicals family_radicals(double c, double d, double e) {
  const double c2_12e = c * c + 12.0 * e;
  const double p = 2.0 * c * c * c + 27.0 * d * d - 72.0 * c * e;
  const double inner = p * p - 4.0 * c2_12e * c2_12e * c2_12e;
  const cplx m1 = std::pow(4.0 * (cplx(p, 0.0) + std::sqrt(cplx(inner, 0.0))), 1.0 / 3.0);
  const cplx m2 = m1 + 4.0 * c2_12e / m1 - 4.0 * c;
  const cplx shared = -12.0 * c - m2;
  const cplx wing = 12.0 * std::sqrt(6.0) * d / std::sqrt(m2);
  return FamilyRadicals{m2, shared - wing, shared + wing};
}

void fill_family(const FamilyRadicals& fam, cplx* w) {
  const double s6 = std::sqrt(6.0);
  const cplx sm2 = std::sqrt(fam.m2);
  const cplx s3p = std::sqrt(fam.m3_t_plus);
  const cplx s3m = std::sqrt(fam.m3_t_minus);
  w[0] = -(s3p + sm2) / (4.0 * s6);
  w[1] = (s3p - sm2) / (4.0 * s6);
  w[2] = -(s3m - sm2) / (4.0 * s6);
  w[3] = (s3m + sm2) / (4.0 * s6);
}

}  // namespace

std::array<double, 8> lf_eigenvalues(double B_L, double B_M, double B_R, double J_LM,
                                     double J_MR) {
  return {0.5 * (B_L + B_M + B_R + J_LM + J_MR), 0.5 * (B_L + B_M - B_R + J_LM - J_MR),
          0.5 * (B_L - B_M + B_R - J_LM - J_MR), 0.5 * (B_L - B_M - B_R - J_LM + J_MR),
          0.5 * (-B_L + B_M + B_R - J_LM + J_MR), 0.5 * (-B_L + B_M - B_R - J_LM - J_MR),
          0.5 * (-B_L - B_M + B_R + J_LM - J_MR), 0.5 * (-B_L - B_M - B_R + J_LM + J_MR)};
}

LFFrequencies lf_frequencies(double B_L, double B_M, double B_R, double J_LM, double J_MR) {
  LFFrequencies f;
  f.L1 = B_L + J_LM;
  f.L2 = B_L - J_LM;
  f.M1 = B_M + J_LM + J_MR;
  f.M2 = B_M + J_LM - J_MR;
  f.M3 = B_M - J_LM + J_MR;
  f.M4 = B_M - J_LM - J_MR;
  f.R1 = B_R + J_MR;
  f.R2 = B_R - J_MR;
  return f;
}

Vector8 lf_steady_kappaM0(double B_L, double B_R, double J_LM, double J_MR,
                          const ReservoirConfig& reservoirs, double p_tilde) {
  if (!(p_tilde >= 0.0 && p_tilde <= 1.0)) {
    throw InvalidInput("lf_steady_kappaM0: p_tilde must lie in [0, 1]");
  }
  if (!(reservoirs.kappa_L > 0.0 && reservoirs.kappa_R > 0.0)) {
    throw InvalidInput("lf_steady_kappaM0: outer reservoirs must be coupled");
  }
  const double wL1 = B_L + J_LM, wL2 = B_L - J_LM;
  const double wR1 = B_R + J_MR, wR2 = B_R - J_MR;
  for (double w : {wL1, wL2, wR1, wR2}) {
    if (!(w > 0.0)) {
      throw InvalidInput("lf_steady_kappaM0: outer transition frequencies must be positive");
    }
  }
  // Within each frozen-middle sector the chain factorizes into independent
  // two-level systems; the spin-up population is proportional to the absorb
  // rate at the sector's local frequency.
  Vector8 out = Vector8::Zero();
  const auto fill_block = [&](double wL, double wR, const std::array<int, 4>& idx,
                              double weight) {
    const BathRates L = bath_rates(wL, reservoirs.T_L, reservoirs.kappa_L);
    const BathRates R = bath_rates(wR, reservoirs.T_R, reservoirs.kappa_R);
    const double norm = (L.absorb + L.emit) * (R.absorb + R.emit);
    out(idx[0]) = weight * L.absorb * R.absorb / norm;  // L up, R up
    out(idx[1]) = weight * L.absorb * R.emit / norm;    // L up, R down
    out(idx[2]) = weight * L.emit * R.absorb / norm;    // L down, R up
    out(idx[3]) = weight * L.emit * R.emit / norm;      // L down, R down
  };
  fill_block(wL1, wR1, {0, 1, 4, 5}, p_tilde);        // middle spin up
  fill_block(wL2, wR2, {2, 3, 6, 7}, 1.0 - p_tilde);  // middle spin down
  return out;
}

HeatCurrents lf_blockade_check(double B_L, double B_R, double J_LM, double J_MR,
                               const ReservoirConfig& reservoirs) {
  if (!(reservoirs.kappa_L > 0.0 && reservoirs.kappa_R > 0.0)) {
    throw InvalidInput("lf_blockade_check: outer reservoirs must be coupled");
  }
  const double wL1 = B_L + J_LM, wL2 = B_L - J_LM;
  const double wR1 = B_R + J_MR, wR2 = B_R - J_MR;
  for (double w : {wL1, wL2, wR1, wR2}) {
    if (!(w > 0.0)) {
      throw InvalidInput("lf_blockade_check: outer transition frequencies must be positive");
    }
  }
  // Net pump rate of one spin against the product-form sector state. The
  // common partner factor is pulled out first, so each term is a literal
  // difference of two identically rounded products and the result is an
  // exact floating-point zero.
  const auto sector_current = [](double w_active, const BathRates& active,
                                 const BathRates& partner) {
    const double gamma = active.absorb * active.emit - active.emit * active.absorb;
    const double partner_mass = partner.absorb + partner.emit;
    const double norm = (active.absorb + active.emit) * partner_mass;
    return w_active * partner_mass * gamma / norm;
  };
  const BathRates L1 = bath_rates(wL1, reservoirs.T_L, reservoirs.kappa_L);
  const BathRates L2 = bath_rates(wL2, reservoirs.T_L, reservoirs.kappa_L);
  const BathRates R1 = bath_rates(wR1, reservoirs.T_R, reservoirs.kappa_R);
  const BathRates R2 = bath_rates(wR2, reservoirs.T_R, reservoirs.kappa_R);

  HeatCurrents q;
  q.Q_L = sector_current(wL1, L1, R1) + sector_current(wL2, L2, R2);
  q.Q_M = 0.0;  // the middle reservoir is decoupled
  q.Q_R = sector_current(wR1, R1, L1) + sector_current(wR2, R2, L2);
  return q;
}

DegenerateSteady bj_degenerate_steady(double B, const ReservoirConfig& reservoirs) {
  if (!(B > 0.0)) throw InvalidInput("bj_degenerate_steady: B must be positive");
  if (!(reservoirs.kappa_L > 0.0 && reservoirs.kappa_M > 0.0 && reservoirs.kappa_R > 0.0)) {
    throw InvalidInput("bj_degenerate_steady: all reservoirs must be coupled");
  }
  // Signed-frequency bath factor: absorb for +omega, emit for -omega.
  const auto J = [&](Spin site, double omega) {
    const double n = planck_occupation(std::abs(omega), reservoirs.temperature(site));
    return omega > 0.0 ? reservoirs.kappa(site) * n : reservoirs.kappa(site) * (n + 1.0);
  };
  const Spin L = Spin::L, M = Spin::M, R = Spin::R;
  const double twoB = 2.0 * B, threeB = 3.0 * B;

  Vector8 r;
  r(0) = J(L, twoB) * J(M, threeB) * J(M, -B) * J(M, B) * J(R, twoB);
  r(1) = J(L, twoB) * J(M, threeB) * J(M, -B) * J(M, B) * J(R, -twoB);
  r(2) = J(L, twoB) * J(M, -threeB) * J(M, -B) * J(M, B) * J(R, twoB);
  r(3) = J(L, twoB) * J(M, threeB) * J(M, -B) * J(M, -B) * J(R, -twoB);
  r(4) = J(L, -twoB) * J(M, threeB) * J(M, -B) * J(M, B) * J(R, twoB);
  r(5) = J(L, -twoB) * J(M, threeB) * J(M, -B) * J(M, B) * J(R, -twoB);
  r(6) = J(L, -twoB) * J(M, threeB) * J(M, -B) * J(M, -B) * J(R, twoB);
  r(7) = J(L, -twoB) * J(M, threeB) * J(M, B) * J(M, B) * J(R, -twoB);

  const double sum = r.sum();
  if (!(sum > 0.0)) {
    throw DegenerateSteadyState(0, "bj_degenerate_steady: all product weights vanished");
  }
  DegenerateSteady out;
  out.populations = r / sum;
  out.currents = HeatCurrents{};  // the closed-form currents cancel identically
  return out;
}

std::array<double, 8> tf_eigenvalues(double B, double J_LM, double J_MR) {
  if (!(B > 0.0)) throw InvalidInput("tf_eigenvalues: B must be positive");
  const double c = -6.0 * B * B - 2.0 * J_LM * J_LM - 2.0 * J_MR * J_MR;
  const double e = -3.0 * B * B * B * B + 2.0 * B * B * (J_LM * J_LM + J_MR * J_MR) +
                   (J_LM * J_LM - J_MR * J_MR) * (J_LM * J_LM - J_MR * J_MR);
  const double d = 8.0 * B * B * B;

  std::array<cplx, 8> w;
  fill_family(family_radicals(c, -d, e), w.data());
  fill_family(family_radicals(c, +d, e), w.data() + 4);

  double residue = 0.0;
  std::array<double, 8> out{};
  for (int i = 0; i < 8; ++i) {
    if (!std::isfinite(w[i].real()) || !std::isfinite(w[i].imag())) {
      throw RadicalBranchError(std::numeric_limits<double>::quiet_NaN(),
                               "tf_eigenvalues: radical chain produced a non-finite value");
    }
    residue = std::max(residue, std::abs(w[i].imag()));
    out[i] = w[i].real();
  }
  if (residue > 1e-8) {
    std::ostringstream msg;
    msg << "tf_eigenvalues: imaginary residue " << residue << " exceeds 1e-8";
    throw RadicalBranchError(residue, msg.str());
  }
  return out;
}

Matrix8 tf_coefficients(double B, double J_LM, double J_MR) {
  const std::array<double, 8> w = tf_eigenvalues(B, J_LM, J_MR);
  const double Jp = J_LM + J_MR;
  const double Jm = J_LM - J_MR;
  const double J2L = J_LM * J_LM;
  const double J2R = J_MR * J_MR;
  const double quartic = 3.0 * B * B * B * B - (J2L - J2R) * (J2L - J2R) -
                         2.0 * B * B * (J2L + J2R);

  Matrix8 lam;
  for (int i = 0; i < 8; ++i) {
    // The coefficient expressions take the eigenvalues at twice the scale of
    // the spectrum itself (the families solve a quartic in 2*omega).
    const double wi = 2.0 * w[i];
    Eigen::Matrix<double, 1, 8> row;
    if (i < 4) {
      const double lmm = B - J_LM - J_MR + wi;
      const double lmp = B - J_LM + J_MR + wi;
      const double lpm = B + J_LM - J_MR + wi;
      const double L2 = lmm / lmp;
      const double L4 = lmm / lpm;
      const double br = quartic + (6.0 * B * B * B + (B * B + Jm * Jm) * Jp) * wi +
                        (3.0 * B * B + Jp * Jp) * wi * wi - Jp * wi * wi * wi;
      const double L3 = br / (B * wi * lmp * lpm);
      row << 1.0, L2, L3, L4, L4, L3, L2, 1.0;
    } else {
      const double lmp = B - J_LM + J_MR - wi;
      const double lpm = B + J_LM - J_MR - wi;
      const double lpp = B + J_LM + J_MR - wi;
      const double L2 = lpp / lpm;
      const double L4 = lpp / lmp;
      const double br = quartic + (-6.0 * B * B * B + (B * B + Jm * Jm) * Jp) * wi +
                        (3.0 * B * B + Jp * Jp) * wi * wi - Jp * wi * wi * wi;
      const double L3 = br / (B * wi * lmp * lpm);
      row << -1.0, L2, -L3, -L4, L4, L3, -L2, 1.0;
    }
    lam.row(i) = row / row.norm();
  }
  return lam;
}

double tf_transition_coefficients(const Matrix8& lambda, Spin site, int i, int j) {
  if (i < 0 || j > 7 || i >= j) {
    throw InvalidInput("tf_transition_coefficients: need 0 <= i < j <= 7");
  }
  if ((i < 4) != (j < 4)) {
    throw InvalidInput("tf_transition_coefficients: levels belong to different parity families");
  }
  Eigen::Matrix<double, 1, 8> r1 = lambda.row(i);
  Eigen::Matrix<double, 1, 8> r2 = lambda.row(j);
  if (i >= 4) {
    static constexpr std::array<double, 8> sign{-1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0, 1.0};
    for (int k = 0; k < 8; ++k) {
      r1(k) *= sign[k];
      r2(k) *= sign[k];
    }
  }
  const double a0 = r1(0), a1 = r1(1), a2 = r1(2), a3 = r1(3);
  const double b0 = r2(0), b1 = r2(1), b2 = r2(2), b3 = r2(3);
  // Folding the raw rows into palindromic form conjugates sigma^x_mu by the
  // alternating sign pattern above; for the upper family that flips the outer
  // pair sum for L and R but the inner pair sum for M.
  const double fam = (i < 4) ? 1.0 : -1.0;
  switch (site) {
    case Spin::L:
      return 2.0 * (fam * (a0 * b3 + a3 * b0) + (a1 * b2 + a2 * b1));
    case Spin::M:
      return 2.0 * ((a0 * b2 + a2 * b0) + fam * (a1 * b3 + a3 * b1));
    case Spin::R:
      return 2.0 * (fam * (a0 * b1 + a1 * b0) + (a2 * b3 + a3 * b2));
  }
  throw InvalidInput("tf_transition_coefficients: unknown site");
}

std::array<std::array<double, 4>, 2> tf_steady_populations(double B, double J_LM, double J_MR,
                                                           const ReservoirConfig& reservoirs) {
  const std::array<double, 8> w = tf_eigenvalues(B, J_LM, J_MR);
  const Matrix8 lam = tf_coefficients(B, J_LM, J_MR);

  // Undirected edges of the complete graph on one 4-level family.
  static constexpr std::array<std::pair<int, int>, 6> kEdges{
      std::pair{0, 1}, std::pair{0, 2}, std::pair{0, 3},
      std::pair{1, 2}, std::pair{1, 3}, std::pair{2, 3}};

  std::array<std::array<double, 4>, 2> result{};
  for (int family = 0; family < 2; ++family) {
    const int offs = 4 * family;

    double rate[4][4] = {};
    for (int a = 0; a < 4; ++a) {
      for (int b = a + 1; b < 4; ++b) {
        const double freq = w[offs + b] - w[offs + a];
        const double wabs = std::abs(freq);
        if (wabs <= 1e-9) continue;  // degenerate pair: drop, as in the numeric path
        double absorb = 0.0, emit = 0.0;
        for (Spin site : kSpins) {
          const double amp = tf_transition_coefficients(lam, site, offs + a, offs + b);
          const BathRates br =
              bath_rates(wabs, reservoirs.temperature(site), reservoirs.kappa(site));
          absorb += 2.0 * amp * amp * br.absorb;
          emit += 2.0 * amp * amp * br.emit;
        }
        if (freq > 0.0) {  // b above a
          rate[a][b] = absorb;
          rate[b][a] = emit;
        } else {  // a above b
          rate[b][a] = absorb;
          rate[a][b] = emit;
        }
      }
    }

    // Markov-chain tree theorem: the stationary weight of a state is the sum
    // over spanning trees, oriented toward it, of the product of edge rates.
    std::array<double, 4> rho{};
    for (int root = 0; root < 4; ++root) {
      double total = 0.0;
      for (int e1 = 0; e1 < 6; ++e1) {
        for (int e2 = e1 + 1; e2 < 6; ++e2) {
          for (int e3 = e2 + 1; e3 < 6; ++e3) {
            const std::array<int, 3> chosen{e1, e2, e3};
            int parent[4] = {-1, -1, -1, -1};
            bool visited[4] = {};
            visited[root] = true;
            int stack[4] = {root};
            int top = 1, count = 1;
            while (top > 0) {
              const int u = stack[--top];
              for (int ek : chosen) {
                const auto [x, y] = kEdges[ek];
                const int v = (x == u) ? y : (y == u ? x : -1);
                if (v >= 0 && !visited[v]) {
                  visited[v] = true;
                  parent[v] = u;
                  stack[top++] = v;
                  ++count;
                }
              }
            }
            if (count != 4) continue;  // the three edges do not span the family
            double product = 1.0;
            for (int v = 0; v < 4; ++v) {
              if (v != root) product *= rate[v][parent[v]];
            }
            total += product;
          }
        }
      }
      rho[root] = total;
    }

    const double norm = rho[0] + rho[1] + rho[2] + rho[3];
    if (!(norm > 0.0)) {
      throw DegenerateSteadyState(
          0, "tf_steady_populations: every spanning-tree weight vanished");
    }
    for (int k = 0; k < 4; ++k) result[family][k] = rho[k] / norm;
  }
  return result;
}

std::array<int, 8> match_levels(const std::array<double, 8>& closed_form,
                                const Vector8& sorted_energies, double tol) {
  std::array<int, 8> perm{};
  std::array<bool, 8> taken{};
  for (int i = 0; i < 8; ++i) {
    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int j = 0; j < 8; ++j) {
      const double dist = std::abs(closed_form[i] - sorted_energies(j));
      if (dist < best_dist) {
        best_dist = dist;
        best = j;
      }
    }
    if (best_dist > tol) {
      std::ostringstream msg;
      msg << "match_levels: level " << i << " has no partner within " << tol
          << " (nearest distance " << best_dist << ")";
      throw InvalidInput(msg.str());
    }
    if (taken[best]) {
      std::ostringstream msg;
      msg << "match_levels: levels collide on sorted index " << best;
      throw InvalidInput(msg.str());
    }
    taken[best] = true;
    perm[i] = best;
  }
  return perm;
}

std::array<int, 8> dominant_bare_indices(const Matrix8& transform) {
  std::array<int, 8> out{};
  for (int r = 0; r < 8; ++r) {
    Eigen::Index idx = 0;
    transform.row(r).cwiseAbs().maxCoeff(&idx);
    out[r] = static_cast<int>(idx);
  }
  return out;
}

}  // namespace spintherm::analytic
