#ifndef FAIRPLUG_REPORT_H_
#define FAIRPLUG_REPORT_H_

#include <string>
#include <vector>

#include "fairplug/geometry.h"
#include "fairplug/sweep.h"

namespace fairplug {

// Line plot of the curve's means with mean +/- band_scale * std bands.
std::string CurveSvg(const TradeoffCurve& curve, double band_scale,
                     const std::string& title);

// Unit-square panel of a region raster: boundary-score signs in two greys,
// margin cells darker, optional vertical asymptote marker.
std::string RasterSvg(const std::vector<RasterCell>& cells, int n,
                      double asymptote_x, bool show_asymptote,
                      const std::string& title);

}  // namespace fairplug

#endif  // FAIRPLUG_REPORT_H_
