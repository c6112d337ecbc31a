#pragma once

#include <string>
#include <vector>

namespace mbfem {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
  bool markers = false;  ///< draw points instead of (or on top of) a polyline
  bool line = true;
};

struct PlotSpec {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool logx = false;
  bool logy = false;
  int width = 640;
  int height = 420;
  std::vector<Series> series;
};

/// Standalone SVG document. Non-finite points (and non-positive ones on log
/// axes) are skipped and break the polyline.
std::string render_svg(const PlotSpec& spec);

/// Colour i of a fixed qualitative palette.
std::string palette(std::size_t i);

}  // namespace mbfem
