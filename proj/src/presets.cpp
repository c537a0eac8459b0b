#include "spintherm/presets.hpp"

#include "spintherm/analytic.hpp"
#include "spintherm/model.hpp"

#include <cmath>
#include <sstream>

namespace spintherm {

namespace {

const double kPi = std::acos(-1.0);

SystemConfig base_modulator() {
  // Shared operating point of the modulator scenarios: hot left reservoir,
  // cold middle and right ones, weak outer dissipation.
  SystemConfig c;
  c.fields = FieldConfig{1.5, 1.5, 1.5, 0.0};
  c.coupling.J_LM = 0.8;
  c.coupling.J_MR = 1.2;
  c.reservoirs = ReservoirConfig{2.0, 0.02, 0.2, 1e-3, 0.0, 1e-3};
  return c;
}

SystemConfig base_transistor(double B, double J_MR) {
  SystemConfig c;
  c.fields = FieldConfig{B, B, B, kPi / 2.0};
  c.coupling.J_LM = 1.0;
  c.coupling.J_MR = J_MR;
  c.reservoirs = ReservoirConfig{0.2, 0.1, 0.02, 1e-3, 1e-3, 1e-3};
  return c;
}

SystemConfig base_diode_fields() {
  // Asymmetry from the local fields.
  SystemConfig c;
  c.fields = FieldConfig{3.0, 2.0, 1.0, 0.05 * kPi};
  c.coupling.J_LM = 0.1;
  c.coupling.J_MR = 0.1;
  c.reservoirs = ReservoirConfig{0.3, 1.0, 0.5, 1e-3, 0.0, 1e-3};
  return c;
}

SystemConfig base_diode_couplings() {
  // Asymmetry from the exchange couplings.
  SystemConfig c;
  c.fields = FieldConfig{1.0, 1.0, 1.0, 0.05 * kPi};
  c.coupling.J_LM = 1.0;
  c.coupling.J_MR = 0.1;
  c.reservoirs = ReservoirConfig{1.0, 1.0, 0.5, 1e-3, 0.0, 1e-3};
  return c;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"fig3a", "fig3b", "fig3c", "fig3d", "fig3e", "fig3f", "fig3g", "fig3h",
          "fig4a", "fig4b", "fig4c", "fig5ab", "fig5cd", "fig6",  "fig7a", "fig7b",
          "fig7c", "fig7d", "qzx-a", "qzx-b", "qzx-c", "tf-xx",  "equilibrium"};
}

SystemConfig make_preset(const std::string& name) {
  if (name == "fig3a" || name == "fig3b" || name == "fig3c") {
    SystemConfig c = base_modulator();
    const double B = (name == "fig3a") ? 0.3 : (name == "fig3b") ? 1.5 : 3.0;
    c.fields.B_L = c.fields.B_M = c.fields.B_R = B;
    return c;
  }
  if (name == "fig3d" || name == "fig3h") {
    SystemConfig c = base_modulator();
    const double B = (name == "fig3d") ? 0.1 : 10.0;
    c.fields.B_L = c.fields.B_M = c.fields.B_R = B;
    c.coupling.J_LM = c.coupling.J_MR = B;
    return c;
  }
  if (name == "fig3e" || name == "fig3f" || name == "fig3g") {
    SystemConfig c = base_modulator();
    c.fields.B_L = 1.0;
    c.fields.B_M = 2.0;
    c.fields.B_R = 3.0;
    const double J = (name == "fig3e") ? 0.5 : (name == "fig3f") ? 2.0 : 8.0;
    c.coupling.J_LM = c.coupling.J_MR = J;
    return c;
  }
  if (name == "fig4a" || name == "fig4b" || name == "fig4c") {
    SystemConfig c = base_modulator();
    c.fields.theta = kPi / 2.0;
    c.reservoirs.kappa_M = (name == "fig4a") ? 0.0 : (name == "fig4b") ? 1e-4 : 1e-3;
    c.initial = EigenPopulationsInitial{
        tf_pair_initial(c.fields.B_L, c.coupling.J_LM, c.coupling.J_MR, 0.5)};
    return c;
  }
  if (name == "fig5ab") return base_transistor(0.01, 1.001);
  if (name == "fig5cd") return base_transistor(0.001, 1.01);
  if (name == "fig6") {
    SystemConfig c = base_modulator();
    c.fields.theta = 0.1 * kPi;
    c.reservoirs.kappa_M = 1e-3;
    return c;
  }
  if (name == "fig7a") return base_diode_fields();
  if (name == "fig7b") return base_diode_couplings();
  if (name == "fig7c") {
    SystemConfig c = base_diode_fields();
    c.fields.theta = kPi / 2.0;
    c.reservoirs.T_L = 1.0;
    return c;
  }
  if (name == "fig7d") {
    SystemConfig c = base_diode_couplings();
    c.fields.theta = kPi / 2.0;
    c.reservoirs.T_L = 1.0;
    return c;
  }
  if (name == "qzx-a" || name == "qzx-b" || name == "qzx-c") {
    SystemConfig c = base_modulator();
    c.coupling.g = {1.0, 0.0, 1.0};
    c.reservoirs.kappa_M = (name == "qzx-a") ? 0.0 : (name == "qzx-b") ? 1e-4 : 1e-3;
    return c;
  }
  if (name == "tf-xx") {
    SystemConfig c = base_modulator();
    c.fields.theta = kPi / 2.0;
    c.coupling.g = {1.0, 0.0, 0.0};
    c.reservoirs.kappa_M = 1e-3;
    return c;
  }
  if (name == "equilibrium") {
    SystemConfig c = base_modulator();
    c.fields.theta = 0.3 * kPi;
    c.reservoirs = ReservoirConfig{1.0, 1.0, 1.0, 1e-3, 1e-3, 1e-3};
    return c;
  }
  std::ostringstream msg;
  msg << "unknown preset '" << name << "'; available:";
  for (const std::string& n : preset_names()) msg << ' ' << n;
  throw InvalidInput(msg.str());
}

SweepDefaults preset_sweep_defaults(const std::string& name) {
  SweepDefaults d;
  if (name == "fig5ab" || name == "fig5cd") {
    d.tm_min = 0.001;
    d.tm_max = 0.2;
  }
  return d;
}

Vector8 tf_pair_initial(double B, double J_LM, double J_MR, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidInput("tf_pair_initial: fraction must lie in [0, 1]");
  }
  FieldConfig fields{B, B, B, kPi / 2.0};
  CouplingConfig coupling;
  coupling.J_LM = J_LM;
  coupling.J_MR = J_MR;
  const Spectrum spectrum = diagonalize(build_hamiltonian(fields, coupling));
  const std::array<double, 8> closed = analytic::tf_eigenvalues(B, J_LM, J_MR);
  const std::array<int, 8> perm = analytic::match_levels(closed, spectrum.energies);

  Vector8 out = Vector8::Zero();
  out(perm[0]) = p;        // lowest level of the even-parity family
  out(perm[4]) = 1.0 - p;  // lowest level of the odd-parity family
  return out;
}

}  // namespace spintherm
