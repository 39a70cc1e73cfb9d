#include "rankone/presets.hpp"

#include "rankone/errors.hpp"

namespace rankone {

namespace {

FigurePreset make(std::string name, ModelParams p, PhaseState ic, long burn, long last) {
  p.delta = 2.0;
  p.b = 0.5;
  return FigurePreset{std::move(name), p, ModelFunctions::sine_family(), ic, burn, last - burn};
}

}  // namespace

FigurePreset figure_preset(const std::string& name) {
  // Published constants verbatim; 6.2831 / 6.2832 are not replaced by 2π.
  // fig5 iterates F(ε1, 0) and shows no t-dynamics: ε2 = δ2 = 0.
  if (name == "fig5")
    return make(name, {.eps1 = 0.105, .eps2 = 0.0, .alpha1 = 6.2831, .alpha2 = 3.14155, .delta1 = 5.0, .delta2 = 0.0},
                {0.6961, 1.3277, 0.5856}, 1000, 21000);
  if (name == "fig6")
    return make(name, {.eps1 = 0.1, .eps2 = 0.0, .alpha1 = 6.2832, .alpha2 = 4.4407, .delta1 = 10.0, .delta2 = 0.001},
                {0.9073, 1.4529, 0.5635}, 1500, 31500);
  if (name == "fig7")
    return make(name, {.eps1 = 0.2, .eps2 = 0.1, .alpha1 = 6.2832, .alpha2 = 3.1416, .delta1 = 5.0, .delta2 = 0.001},
                {0.8394, 1.3789, 0.8716}, 5000, 105000);
  if (name == "fig8")
    return make(name, {.eps1 = 0.2, .eps2 = 0.1, .alpha1 = 6.2832, .alpha2 = 1.5708, .delta1 = 5.0, .delta2 = 1e-7},
                {0.8162, 1.0488, 0.6393}, 5000, 105000);
  throw UnknownPreset("unknown figure preset \"" + name + "\" (expected fig5, fig6, fig7 or fig8)");
}

std::vector<std::string> preset_names() { return {"fig5", "fig6", "fig7", "fig8"}; }

}  // namespace rankone
