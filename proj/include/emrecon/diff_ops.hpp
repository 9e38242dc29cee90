#pragma once

#include <cstdint>
#include <vector>

#include "emrecon/image.hpp"

namespace emrecon {

/// Periodic forward differences of an image in both orientations:
/// vertical[i][j]   = x[i+1][j] - x[i][j]   (wrap at the last row)
/// horizontal[i][j] = x[i][j+1] - x[i][j]   (wrap at the last column)
struct EdgeMap {
  int n = 0;
  Image vertical;
  Image horizontal;
};

/// Pair of binary masks aligned with the two difference orientations.
/// Entries are exactly 0 (detected edge) or 1 (smooth; regularized).
struct MaskPair {
  int n = 0;
  std::vector<uint8_t> vertical;    // row-major n*n
  std::vector<uint8_t> horizontal;

  static MaskPair ones(int n) {
    MaskPair m;
    m.n = n;
    m.vertical.assign(static_cast<size_t>(n) * n, 1);
    m.horizontal.assign(static_cast<size_t>(n) * n, 1);
    return m;
  }
  static MaskPair zeros(int n) {
    MaskPair m;
    m.n = n;
    m.vertical.assign(static_cast<size_t>(n) * n, 0);
    m.horizontal.assign(static_cast<size_t>(n) * n, 0);
    return m;
  }
};

/// Apply the periodic forward-difference matrix to a vector:
/// out[i] = v[i+1] - v[i] for i < n-1, out[n-1] = v[0] - v[n-1].
void apply_difference(const double* v, double* out, int n);

/// Dense n-by-n realization of the same matrix, row-major. Test surface
/// only; refuses n > 16.
std::vector<double> dense_difference_matrix(int n);

Image d_v(const Image& x);
Image d_h(const Image& x);
Image d_v_adjoint(const Image& y);
Image d_h_adjoint(const Image& y);

EdgeMap edge_map(const Image& x);

/// Isotropic total variation with periodic wrap:
/// sum_{i,j} sqrt((x[i+1][j]-x[i][j])^2 + (x[i][j+1]-x[i][j])^2).
double tv_iso(const Image& x);

/// ||M_v o D_v(x)||_F^2 + ||M_h o D_h(x)||_F^2 (o = elementwise product).
double masked_quadratic(const Image& x, const MaskPair& masks);

}  // namespace emrecon
