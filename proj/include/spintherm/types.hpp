#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

/// Three spin-1/2 sites in a direction-adjustable magnetic field, each site
/// weakly coupled to its own bosonic reservoir.  Units: energies and
/// temperatures in B_0 (k_B = 1), rates in B_0 as well (hbar = 1).
namespace spintherm {

using Vector8 = Eigen::Matrix<double, 8, 1>;
using Matrix8 = Eigen::Matrix<double, 8, 8>;

/// Chain sites, left to right.
enum class Spin : int { L = 0, M = 1, R = 2 };

enum class Axis : int { X = 0, Y = 1, Z = 2 };

inline constexpr std::array<Spin, 3> kSpins{Spin::L, Spin::M, Spin::R};

inline const char* to_string(Spin mu) {
  switch (mu) {
    case Spin::L: return "L";
    case Spin::M: return "M";
    default: return "R";
  }
}

/// Local field amplitudes B_mu and the common tilt angle theta, with
/// B^x = B sin(theta) and B^z = B cos(theta): theta = s*pi is the
/// longitudinal (LF) orientation, theta = (2s+1)*pi/2 the transverse (TF).
struct FieldConfig {
  double B_L = 1.0;
  double B_M = 1.0;
  double B_R = 1.0;
  double theta = 0.0;

  double amplitude(Spin mu) const {
    switch (mu) {
      case Spin::L: return B_L;
      case Spin::M: return B_M;
      default: return B_R;
    }
  }
};

/// Nearest-neighbour XYZ exchange,
///   H_int = sum_{(L,M),(M,R)} (J/2) (g_x XX + g_y YY + g_z ZZ);
/// g = (0,0,1) is the pure ZZ chain.  There is no direct L-R coupling.
struct CouplingConfig {
  double J_LM = 0.0;
  double J_MR = 0.0;
  std::array<double, 3> g{0.0, 0.0, 1.0};
};

/// Per-site reservoir temperatures and flat-spectrum dissipation rates.
struct ReservoirConfig {
  double T_L = 1.0;
  double T_M = 1.0;
  double T_R = 1.0;
  double kappa_L = 0.0;
  double kappa_M = 0.0;
  double kappa_R = 0.0;

  double temperature(Spin mu) const {
    switch (mu) {
      case Spin::L: return T_L;
      case Spin::M: return T_M;
      default: return T_R;
    }
  }
  double kappa(Spin mu) const {
    switch (mu) {
      case Spin::L: return kappa_L;
      case Spin::M: return kappa_M;
      default: return kappa_R;
    }
  }
  double max_kappa() const {
    return std::max(kappa_L, std::max(kappa_M, kappa_R));
  }
};

/// Numerical thresholds (all energies in units of B_0).
struct Tolerances {
  /// Transitions with frequency <= eps_zero are dropped: exactly degenerate
  /// pairs carry no net rate, and the flat-spectrum occupation diverges at
  /// zero frequency.
  double eps_zero = 1e-9;
  /// Transitions with |amplitude| below eps_amp are numerical zeros.
  double eps_amp = 1e-12;
  /// Absolute connectivity threshold for the subspace graph; unset means
  /// 1e-13 * max|M|, scale-relative across kappa magnitudes.
  std::optional<double> eps_conn;
  /// Central-difference step in T_M for the amplification factor.
  double dT = 1e-4;
};

/// Result of diagonalizing the chain Hamiltonian.  Row i of `transform`
/// holds eigenvector |i> in the bare product basis |s_L s_M s_R>, ordered
/// with L as the most significant bit and up = 0, so bare index 0 is
/// |up up up> and bare index 7 is |down down down>.
struct Spectrum {
  Vector8 energies;   ///< ascending, sum to zero (traceless H)
  Matrix8 transform;  ///< Lambda with Lambda H Lambda^T = diag(energies)
};

/// Heat currents into the system from each reservoir.  Positive = energy
/// flows from reservoir mu into the working medium.
struct HeatCurrents {
  double Q_L = 0.0;
  double Q_M = 0.0;
  double Q_R = 0.0;

  double operator[](Spin mu) const {
    switch (mu) {
      case Spin::L: return Q_L;
      case Spin::M: return Q_M;
      default: return Q_R;
    }
  }
  double sum() const { return Q_L + Q_M + Q_R; }
};

/// Start from a single bare basis state (projected onto eigenbasis populations).
struct BareIndexInitial {
  int index = 0;
};

/// Explicit eigenbasis populations; must sum to one.
struct EigenPopulationsInitial {
  Vector8 populations = Vector8::Zero();
};

/// Fraction p on the invariant component that contains the top eigenvalue,
/// the remainder spread over the other components in proportion to size.
struct SubspaceFractionInitial {
  double p = 0.5;
};

using InitialState =
    std::variant<BareIndexInitial, EigenPopulationsInitial, SubspaceFractionInitial>;

/// Complete scenario description consumed by sweeps, the CLI, and serialization.
struct SystemConfig {
  FieldConfig fields;
  CouplingConfig coupling;
  ReservoirConfig reservoirs;
  InitialState initial = SubspaceFractionInitial{0.5};
  Tolerances tolerances;
};

class InvalidInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A connected rate block carried a stationary null space of dimension != 1.
class DegenerateSteadyState : public std::runtime_error {
 public:
  DegenerateSteadyState(int null_dimension, const std::string& what)
      : std::runtime_error(what), null_dimension_(null_dimension) {}
  int null_dimension() const { return null_dimension_; }

 private:
  int null_dimension_;
};

/// The closed-form eigenvalue radicals left a complex residue, i.e. a branch
/// of the nested roots was picked up incorrectly.
class RadicalBranchError : public std::runtime_error {
 public:
  RadicalBranchError(double residue, const std::string& what)
      : std::runtime_error(what), residue_(residue) {}
  double residue() const { return residue_; }

 private:
  double residue_;
};

}  // namespace spintherm
