#pragma once

#include <string>
#include <vector>

#include "rankone/model.hpp"

namespace rankone {

/// Parameters, initial condition and plotting window of one of the
/// published orbit pictures. All use the sine family with δ = 2, b = 0.5.
struct FigurePreset {
  std::string name;
  ModelParams params;
  ModelFunctions funcs;
  PhaseState ic;
  long burn = 0;     // iterates 1..burn are discarded
  long samples = 0;  // iterates burn+1 .. burn+samples are kept
};

/// fig5, fig6, fig7 or fig8. Throws UnknownPreset.
FigurePreset figure_preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace rankone
