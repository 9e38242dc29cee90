#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace emrecon {

/// Square real-valued pixel grid. Row index i runs top to bottom, column
/// index j left to right. Also used as a generic real n-by-n field.
struct Image {
  int n = 0;
  std::vector<double> pixels;  // row-major, pixels[i*n + j]

  Image() = default;
  explicit Image(int side, double fill = 0.0)
      : n(side), pixels(static_cast<size_t>(side) * side, fill) {}

  double& at(int i, int j) { return pixels[static_cast<size_t>(i) * n + j]; }
  double at(int i, int j) const { return pixels[static_cast<size_t>(i) * n + j]; }

  bool operator==(const Image&) const = default;
};

struct Ellipse {
  double center_x;
  double center_y;
  double semi_axis_a;  // along the rotated x direction
  double semi_axis_b;
  double rotation;     // radians, counterclockwise
  double intensity_delta;
};

/// The ten-ellipse head phantom parameter set (high-contrast variant).
/// The table in docs/phantom.md is the normative source for these values.
const std::vector<Ellipse>& shepp_logan_ellipses();

/// Rasterize the phantom by point membership: pixel (i,j) is sampled at its
/// center (x,y) = (-1 + (2j+1)/n, 1 - (2i+1)/n) and receives the sum of
/// intensity deltas of every ellipse containing that point.
Image shepp_logan(int n);

enum class Orientation { horizontal, vertical };

/// Copy of row `index` (horizontal) or column `index` (vertical, read top to
/// bottom). Throws std::out_of_range for a bad index.
std::vector<double> cross_section(const Image& img, Orientation orient, int index);

// --- raster I/O ---------------------------------------------------------
//
// CSV: n rows of n comma-separated decimal literals, row-major, each row
// '\n' terminated. Lossless round trip for finite doubles.
// PGM: binary P5, maxval 255; values are clamped to [0,1] then rounded,
// so a round trip moves a pixel by at most 1/510.

void save_image_csv(const Image& img, const std::string& path);
Image load_image_csv(const std::string& path);

void save_image_pgm(const Image& img, const std::string& path);
Image load_image_pgm(const std::string& path);

/// Dispatch on extension: ".pgm" is binary PGM, anything else float CSV.
void save_image(const Image& img, const std::string& path);
Image load_image(const std::string& path);

// small vector helpers shared by the numeric modules
double dot(const Image& a, const Image& b);
double norm2(const Image& a);

}  // namespace emrecon
