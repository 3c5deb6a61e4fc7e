#include "fairplug/report.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fairplug/text_io.h"

namespace fairplug {
namespace {

constexpr double kWidth = 480, kHeight = 360, kMargin = 48;

std::string Escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string Num(double v) { return FormatDouble(std::round(v * 100.0) / 100.0); }

}  // namespace

std::string CurveSvg(const TradeoffCurve& curve, double band_scale, const std::string& title) {
  std::vector<const CurveBin*> present;
  for (const auto& b : curve.bins) {
    if (b.n_splits > 0) present.push_back(&b);
  }
  double y_max = 0.0;
  for (const auto* b : present) y_max = std::max(y_max, b->mean + band_scale * b->std);
  if (y_max <= 0.0) y_max = 1.0;
  const double x_lo = kBinFloor, x_hi = 1.0;
  auto px = [&](double x) { return kMargin + (x - x_lo) / (x_hi - x_lo) * (kWidth - 2 * kMargin); };
  auto py = [&](double y) { return kHeight - kMargin - y / y_max * (kHeight - 2 * kMargin); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\">" << Escape(title)
      << "</text>\n"
      << "<line x1=\"" << kMargin << "\" y1=\"" << py(0) << "\" x2=\"" << kWidth - kMargin
      << "\" y2=\"" << py(0) << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << kMargin << "\" y1=\"" << py(0) << "\" x2=\"" << kMargin
      << "\" y2=\"" << kMargin << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\">balanced accuracy</text>\n"
      << "<text x=\"12\" y=\"" << kHeight / 2 << "\" transform=\"rotate(-90 12 " << kHeight / 2
      << ")\" text-anchor=\"middle\">fairness violation</text>\n";
  for (double t = x_lo; t <= x_hi + 1e-9; t += 0.1) {
    svg << "<text x=\"" << Num(px(t)) << "\" y=\"" << Num(py(0) + 16)
        << "\" font-size=\"10\" text-anchor=\"middle\">" << Num(t) << "</text>\n";
  }
  auto polyline = [&](auto value, const char* style) {
    svg << "<polyline fill=\"none\" " << style << " points=\"";
    for (const auto* b : present) {
      svg << Num(px(b->bin_low + curve.bin_width / 2)) << ',' << Num(py(value(*b))) << ' ';
    }
    svg << "\"/>\n";
  };
  if (band_scale > 0.0) {
    polyline([&](const CurveBin& b) { return b.mean + band_scale * b.std; },
             "stroke=\"steelblue\" stroke-dasharray=\"3,3\"");
    polyline([&](const CurveBin& b) { return std::max(0.0, b.mean - band_scale * b.std); },
             "stroke=\"steelblue\" stroke-dasharray=\"3,3\"");
  }
  polyline([](const CurveBin& b) { return b.mean; }, "stroke=\"steelblue\" stroke-width=\"2\"");
  svg << "</svg>\n";
  return svg.str();
}

std::string RasterSvg(const std::vector<RasterCell>& cells, int n, double asymptote_x,
                      bool show_asymptote, const std::string& title) {
  const double side = kHeight - 2 * kMargin;
  const double cell = n > 1 ? side / double(n - 1) : side;
  auto px = [&](double u) { return kMargin + u * side; };
  auto py = [&](double v) { return kMargin + (1.0 - v) * side; };
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << side + 2 * kMargin
      << "\" height=\"" << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kMargin + side / 2 << "\" y=\"20\" text-anchor=\"middle\">"
      << Escape(title) << "</text>\n";
  for (const auto& c : cells) {
    const char* fill = c.in_margin ? "#555555" : (c.sign > 0 ? "#d9d9d9" : "#ffffff");
    svg << "<rect x=\"" << Num(px(c.u) - cell / 2) << "\" y=\"" << Num(py(c.v) - cell / 2)
        << "\" width=\"" << Num(cell) << "\" height=\"" << Num(cell) << "\" fill=\"" << fill
        << "\"/>\n";
  }
  svg << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << side
      << "\" height=\"" << side << "\" fill=\"none\" stroke=\"black\"/>\n";
  if (show_asymptote && asymptote_x >= 0.0 && asymptote_x <= 1.0) {
    svg << "<line x1=\"" << Num(px(asymptote_x)) << "\" y1=\"" << kMargin << "\" x2=\""
        << Num(px(asymptote_x)) << "\" y2=\"" << kMargin + side
        << "\" stroke=\"red\" stroke-dasharray=\"4,4\"/>\n";
  }
  if (show_asymptote) {
    svg << "<text x=\"" << kMargin + side / 2 << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\">asymptote x = " << FormatDouble(asymptote_x)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace fairplug
