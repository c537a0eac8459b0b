#include "spintherm/model.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>
#include <vector>

namespace spintherm {

Matrix8 pauli_word(Spin label, Axis axis) {
  const int shift = 2 - static_cast<int>(label);  // L -> bit 2, M -> bit 1, R -> bit 0
  Matrix8 P = Matrix8::Zero();
  for (int b = 0; b < 8; ++b) {
    const int bit = (b >> shift) & 1;  // 0 = up, 1 = down
    const int flipped = b ^ (1 << shift);
    switch (axis) {
      case Axis::X:
        P(flipped, b) = 1.0;
        break;
      case Axis::Y:
        // y~ = [[0,1],[-1,0]] on (up, down)
        P(flipped, b) = (bit == 0) ? -1.0 : 1.0;
        break;
      case Axis::Z:
        P(b, b) = (bit == 0) ? 1.0 : -1.0;
        break;
    }
  }
  return P;
}

Matrix8 build_hamiltonian(const FieldConfig& fields, const CouplingConfig& coupling) {
  const double sx = std::sin(fields.theta);
  const double cz = std::cos(fields.theta);
  Matrix8 H = Matrix8::Zero();
  for (Spin mu : kSpins) {
    const double B = fields.amplitude(mu);
    H += 0.5 * B * (sx * pauli_word(mu, Axis::X) + cz * pauli_word(mu, Axis::Z));
  }
  const auto [gx, gy, gz] = coupling.g;
  const std::array<std::tuple<Spin, Spin, double>, 2> bonds{
      std::tuple{Spin::L, Spin::M, coupling.J_LM},
      std::tuple{Spin::M, Spin::R, coupling.J_MR}};
  for (const auto& [a, b, J] : bonds) {
    if (gx != 0.0) H += 0.5 * J * gx * pauli_word(a, Axis::X) * pauli_word(b, Axis::X);
    // sigma_y sigma_y = (i y~)(i y~) = -(y~ y~)
    if (gy != 0.0) H -= 0.5 * J * gy * pauli_word(a, Axis::Y) * pauli_word(b, Axis::Y);
    if (gz != 0.0) H += 0.5 * J * gz * pauli_word(a, Axis::Z) * pauli_word(b, Axis::Z);
  }
  return H;
}

Spectrum diagonalize(const Matrix8& H) {
  const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidInput("diagonalize: matrix is not symmetric within 1e-12");
  }
  Eigen::SelfAdjointEigenSolver<Matrix8> solver(H);
  if (solver.info() != Eigen::Success) {
    throw InvalidInput("diagonalize: eigensolver did not converge");
  }

  Spectrum spec;
  spec.energies = solver.eigenvalues();
  spec.transform = solver.eigenvectors().transpose();

  // Deterministic order inside degenerate groups: sort by dominant bare index.
  const double tie = 1e-12 * std::max(1.0, spec.energies.cwiseAbs().maxCoeff());
  for (int lo = 0; lo < 8;) {
    int hi = lo + 1;
    while (hi < 8 && spec.energies(hi) - spec.energies(hi - 1) <= tie) ++hi;
    if (hi - lo > 1) {
      std::vector<int> rows(hi - lo);
      std::iota(rows.begin(), rows.end(), lo);
      auto dominant = [&](int r) {
        Eigen::Index d = 0;
        spec.transform.row(r).cwiseAbs().maxCoeff(&d);
        return static_cast<int>(d);
      };
      std::stable_sort(rows.begin(), rows.end(),
                       [&](int a, int b) { return dominant(a) < dominant(b); });
      Eigen::Matrix<double, Eigen::Dynamic, 8> block(hi - lo, 8);
      Eigen::VectorXd vals(hi - lo);
      for (int k = 0; k < hi - lo; ++k) {
        block.row(k) = spec.transform.row(rows[k]);
        vals(k) = spec.energies(rows[k]);
      }
      spec.transform.middleRows(lo, hi - lo) = block;
      spec.energies.segment(lo, hi - lo) = vals;
    }
    lo = hi;
  }

  // Sign convention: first non-negligible component of each row positive.
  for (int r = 0; r < 8; ++r) {
    const double mx = spec.transform.row(r).cwiseAbs().maxCoeff();
    for (int c = 0; c < 8; ++c) {
      if (std::abs(spec.transform(r, c)) > 1e-9 * mx) {
        if (spec.transform(r, c) < 0.0) spec.transform.row(r) = -spec.transform.row(r);
        break;
      }
    }
  }
  return spec;
}

}  // namespace spintherm
