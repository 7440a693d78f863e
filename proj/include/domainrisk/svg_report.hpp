#pragma once

#include <string>

#include "domainrisk/pipeline.hpp"

namespace drisk {

struct SvgOptions {
  int width = 900;
  int height = 320;
};

// Renders a risk timeline as a standalone SVG document: a step line of the
// per-date probabilities, the decision threshold as a dashed rule, and one
// marker per evaluation point carrying a <title> tooltip (with top
// attributions when the timeline was produced with explanations). Output is
// byte-deterministic for a given timeline. Throws std::invalid_argument when
// the timeline has no points or the options are degenerate.
std::string render_svg(const RiskTimeline& timeline, const SvgOptions& options = {});

}  // namespace drisk
