#pragma once

#include "spintherm/types.hpp"

#include <string>
#include <vector>

namespace spintherm {

// Named demonstration scenarios covering the device's operating regimes:
// longitudinal blockade (fig3*), transient relaxation (fig4*), thermal
// amplification (fig5*), current switching (fig6), rectification (fig7*),
// mixed-coupling variants (qzx-*, tf-xx) and a global-equilibrium check.
std::vector<std::string> preset_names();

// Throws InvalidInput (listing the valid names) for an unknown preset.
SystemConfig make_preset(const std::string& name);

// Default T_M sweep window and grid size for a preset.
struct SweepDefaults {
  double tm_min = 0.02;
  double tm_max = 2.0;
  int grid = 200;
};

SweepDefaults preset_sweep_defaults(const std::string& name);

// Eigenbasis populations placing weight p on the lowest even-family level and
// 1-p on the lowest odd-family level (closed-form rows 0 and 4), for
// transverse-field scenarios. The closed-form levels are matched to the
// numerically sorted spectrum before assigning weights.
Vector8 tf_pair_initial(double B, double J_LM, double J_MR, double p);

}  // namespace spintherm
