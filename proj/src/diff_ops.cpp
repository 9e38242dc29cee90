#include "emrecon/diff_ops.hpp"

#include <cmath>
#include <stdexcept>

namespace emrecon {

void apply_difference(const double* v, double* out, int n) {
  for (int i = 0; i + 1 < n; ++i) out[i] = v[i + 1] - v[i];
  out[n - 1] = v[0] - v[n - 1];
}

std::vector<double> dense_difference_matrix(int n) {
  if (n < 1 || n > 16)
    throw std::invalid_argument("dense_difference_matrix: n must be in [1,16]");
  std::vector<double> m(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    m[static_cast<size_t>(i) * n + i] += -1.0;
    m[static_cast<size_t>(i) * n + (i + 1) % n] += 1.0;
  }
  return m;
}

Image d_v(const Image& x) {
  const int n = x.n;
  Image out(n);
  for (int i = 0; i < n; ++i) {
    const int ip = (i + 1 == n) ? 0 : i + 1;
    for (int j = 0; j < n; ++j) out.at(i, j) = x.at(ip, j) - x.at(i, j);
  }
  return out;
}

Image d_h(const Image& x) {
  const int n = x.n;
  Image out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int jp = (j + 1 == n) ? 0 : j + 1;
      out.at(i, j) = x.at(i, jp) - x.at(i, j);
    }
  return out;
}

Image d_v_adjoint(const Image& y) {
  // multiplication by D^T down each column: out[i] = y[i-1] - y[i], wrapped
  const int n = y.n;
  Image out(n);
  for (int i = 0; i < n; ++i) {
    const int im = (i == 0) ? n - 1 : i - 1;
    for (int j = 0; j < n; ++j) out.at(i, j) = y.at(im, j) - y.at(i, j);
  }
  return out;
}

Image d_h_adjoint(const Image& y) {
  const int n = y.n;
  Image out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int jm = (j == 0) ? n - 1 : j - 1;
      out.at(i, j) = y.at(i, jm) - y.at(i, j);
    }
  return out;
}

EdgeMap edge_map(const Image& x) {
  EdgeMap e;
  e.n = x.n;
  e.vertical = d_v(x);
  e.horizontal = d_h(x);
  return e;
}

double tv_iso(const Image& x) {
  const int n = x.n;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const int ip = (i + 1 == n) ? 0 : i + 1;
    for (int j = 0; j < n; ++j) {
      const int jp = (j + 1 == n) ? 0 : j + 1;
      const double dv = x.at(ip, j) - x.at(i, j);
      const double dh = x.at(i, jp) - x.at(i, j);
      total += std::sqrt(dv * dv + dh * dh);
    }
  }
  return total;
}

double masked_quadratic(const Image& x, const MaskPair& masks) {
  if (masks.n != x.n) throw std::invalid_argument("masked_quadratic: dimension mismatch");
  const Image dv = d_v(x);
  const Image dh = d_h(x);
  double total = 0.0;
  for (size_t k = 0; k < dv.pixels.size(); ++k) {
    if (masks.vertical[k]) total += dv.pixels[k] * dv.pixels[k];
    if (masks.horizontal[k]) total += dh.pixels[k] * dh.pixels[k];
  }
  return total;
}

}  // namespace emrecon
