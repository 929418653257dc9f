#pragma once

#include "mdd/denoise.hpp"

#include <string>
#include <vector>

namespace mdd {

// Writes alpha_vs_k.svg (exponent per mode index with the cut marked) and,
// when curves are present, loglog_fluctuation.svg (ln F vs ln s with the
// fitted line and slope per mode). Hand-emitted static SVG.
void emit_plots(const DenoiseReport& report, const std::vector<FluctuationCurve>& curves,
                const std::string& dir);

} // namespace mdd
