#pragma once

#include <string>

#include "swipt/transceiver.hpp"

namespace swipt {

// Static scatter plot of a constellation: equal-aspect axes, cross-hairs
// through the origin, a dashed reference circle of radius sqrt(P_a) where
// P_a is the constellation's mean power, and one `class="marker"` circle per
// point. The half-range covers every point and the reference circle.
std::string render_constellation_svg(const Constellation& c, int size_px = 480,
                                     const std::string& title = "");

// Half-width of the plotted square in signal units.
double plot_half_range(const Constellation& c);

}  // namespace swipt
