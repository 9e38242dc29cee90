#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "emrecon/image.hpp"

namespace emrecon {

/// 2D DFT coefficients of an n-by-n grid, stored in wrap-around order:
/// signed frequency (p,q), p and q in {-ceil(n/2)+1, ..., floor(n/2)},
/// lives at row (p mod n), column (q mod n). DC is entry (0,0).
struct Spectrum {
  int n = 0;
  std::vector<std::complex<double>> coeffs;  // row-major, n*n

  Spectrum() = default;
  explicit Spectrum(int side)
      : n(side), coeffs(static_cast<size_t>(side) * side, {0.0, 0.0}) {}

  static int wrap(int f, int n) { return ((f % n) + n) % n; }

  std::complex<double>& at(int p, int q) {
    return coeffs[static_cast<size_t>(wrap(p, n)) * n + wrap(q, n)];
  }
  std::complex<double> at(int p, int q) const {
    return coeffs[static_cast<size_t>(wrap(p, n)) * n + wrap(q, n)];
  }
};

/// Complex-valued n-by-n field, the output of the inverse transform.
struct ComplexField {
  int n = 0;
  std::vector<std::complex<double>> values;

  ComplexField() = default;
  explicit ComplexField(int side)
      : n(side), values(static_cast<size_t>(side) * side, {0.0, 0.0}) {}
};

/// Unitary 2D DFT (scale 1/n each direction), so Parseval holds exactly:
/// ||dft2(x)|| = ||x||, and idft2 is the exact inverse.
Spectrum dft2(const Image& img);
ComplexField idft2(const Spectrum& spec);

Image real_part(const ComplexField& f);
double max_imag_abs(const ComplexField& f);

/// Set of DFT grid indices covered by `line_count` radial lines through DC.
/// Indices are duplicate-free, lexicographically sorted, and always
/// include DC.
struct SamplingPattern {
  int n = 0;
  int line_count = 0;
  std::vector<std::pair<int, int>> indices;  // (p,q) signed frequencies

  bool contains_all() const {
    return indices.size() == static_cast<size_t>(n) * static_cast<size_t>(n);
  }
};

/// Lines at angles theta_l = pi*l/L; each is rasterized by stepping
/// t = -floor(n/2)..floor(n/2) and rounding (t cos, t sin) to the nearest
/// grid frequency (reduced mod n into the canonical range).
SamplingPattern radial_pattern(int n, int lines);

/// Every frequency pair; line_count is recorded as n.
SamplingPattern full_pattern(int n);

/// Coefficients extracted on a pattern, aligned with pattern.indices.
struct SampledData {
  SamplingPattern pattern;
  std::vector<std::complex<double>> values;
};

SampledData sample(const Spectrum& spec, const SamplingPattern& pattern);
/// Scatter values back onto an otherwise-zero spectrum (the exact adjoint
/// of sample under the standard complex inner products).
Spectrum sample_adjoint(const SampledData& data);

/// Adds independent zero-mean Gaussian draws of standard deviation sigma to
/// the real and imaginary part of every value. Deterministic given seed
/// (Box-Muller over a mt19937_64 stream, independent of the C++ library's
/// distribution implementation).
SampledData add_noise(const SampledData& data, double sigma, uint64_t seed);

/// Deterministic N(0,1) stream used by add_noise; exposed for tests.
/// mt19937_64 is fully pinned by the standard, and the Box-Muller transform
/// here avoids the implementation-defined std::normal_distribution.
class GaussianStream {
 public:
  explicit GaussianStream(uint64_t seed) : engine_(seed) {}
  double next();

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Data file: optional '# n=<n> lines=<L>' comment, then header 'p,q,re,im',
// one row per sample in pattern order.
void save_sampled_data_csv(const SampledData& data, const std::string& path);
SampledData load_sampled_data_csv(const std::string& path);

}  // namespace emrecon
