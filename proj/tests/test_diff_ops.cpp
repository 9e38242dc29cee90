#include <doctest.h>

#include "emrecon/diff_ops.hpp"
#include "oracles.hpp"

using namespace emrecon;

namespace {

Image dense_apply_columns(const std::vector<double>& m, const Image& x) {
  // (M X) with M acting down each column of X
  const int n = x.n;
  Image out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += m[static_cast<size_t>(i) * n + k] * x.at(k, j);
      out.at(i, j) = acc;
    }
  return out;
}

std::vector<double> transpose(const std::vector<double>& m, int n) {
  std::vector<double> t(m.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t[static_cast<size_t>(j) * n + i] = m[static_cast<size_t>(i) * n + j];
  return t;
}

}  // namespace

TEST_CASE("difference matrix on small vectors") {
  double v[3] = {1.0, 0.0, 0.0};
  double out[3];
  apply_difference(v, out, 3);
  CHECK(out[0] == -1.0);
  CHECK(out[1] == 0.0);
  CHECK(out[2] == 1.0);

  double c[4] = {2.5, 2.5, 2.5, 2.5};
  double oc[4];
  apply_difference(c, oc, 4);
  for (double w : oc) CHECK(w == 0.0);

  double single[1] = {3.0};
  double os[1];
  apply_difference(single, os, 1);
  CHECK(os[0] == 0.0);
}

TEST_CASE("dense realization matches apply_difference") {
  const auto m = dense_difference_matrix(3);
  // row i: -1 at i, +1 at (i+1) mod 3
  CHECK(m[0] == -1.0);
  CHECK(m[1] == 1.0);
  CHECK(m[2] == 0.0);
  CHECK(m[6] == 1.0);  // wrap entry
  CHECK(m[8] == -1.0);
  CHECK_THROWS_AS(dense_difference_matrix(17), std::invalid_argument);
  CHECK(dense_difference_matrix(1)[0] == 0.0);
}

TEST_CASE("vertical differences of a single hot row") {
  Image x(4, 0.0);
  for (int j = 0; j < 4; ++j) x.at(1, j) = 1.0;
  const Image dv = d_v(x);
  for (int j = 0; j < 4; ++j) {
    CHECK(dv.at(0, j) == 1.0);
    CHECK(dv.at(1, j) == -1.0);
    CHECK(dv.at(2, j) == 0.0);
    CHECK(dv.at(3, j) == 0.0);
  }
  const Image dh = d_h(x);
  for (double v : dh.pixels) CHECK(v == 0.0);
}

TEST_CASE("constant images have zero differences and zero TV") {
  Image x(6, 1.75);
  for (double v : d_v(x).pixels) CHECK(v == 0.0);
  for (double v : d_h(x).pixels) CHECK(v == 0.0);
  CHECK(tv_iso(x) == 0.0);
}

TEST_CASE("d_v and d_h match the dense matrix products") {
  const Image x = oracle::random_image(8, 21, -1.0, 1.0);
  const auto m = dense_difference_matrix(8);
  const Image dv_ref = dense_apply_columns(m, x);
  const Image dv_got = d_v(x);
  for (size_t k = 0; k < dv_got.pixels.size(); ++k)
    CHECK(dv_got.pixels[k] == doctest::Approx(dv_ref.pixels[k]).epsilon(1e-12));

  // horizontal differences: transpose, apply down columns, transpose back
  Image xt(8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) xt.at(j, i) = x.at(i, j);
  const Image dh_t = dense_apply_columns(m, xt);
  const Image dh_got = d_h(x);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) CHECK(dh_got.at(i, j) == doctest::Approx(dh_t.at(j, i)).epsilon(1e-12));
}

TEST_CASE("adjoints satisfy the dot-product identity") {
  for (int trial = 0; trial < 50; ++trial) {
    const Image x = oracle::random_image(9, 1000 + trial, -1.0, 1.0);
    const Image y = oracle::random_image(9, 2000 + trial, -1.0, 1.0);
    CHECK(dot(d_v(x), y) == doctest::Approx(dot(x, d_v_adjoint(y))).epsilon(1e-12));
    CHECK(dot(d_h(x), y) == doctest::Approx(dot(x, d_h_adjoint(y))).epsilon(1e-12));
  }
}

TEST_CASE("d_v_adjoint is the dense transpose") {
  const Image y = oracle::random_image(8, 22, -1.0, 1.0);
  const auto mt = transpose(dense_difference_matrix(8), 8);
  const Image ref = dense_apply_columns(mt, y);
  const Image got = d_v_adjoint(y);
  for (size_t k = 0; k < got.pixels.size(); ++k)
    CHECK(got.pixels[k] == doctest::Approx(ref.pixels[k]).epsilon(1e-12));
  for (double v : d_v_adjoint(d_v(Image(8, 4.0))).pixels) CHECK(v == 0.0);
}

TEST_CASE("differences telescope to zero along the wrapped axis") {
  const Image x = oracle::random_image(16, 23, -2.0, 2.0);
  const Image dv = d_v(x);
  for (int j = 0; j < 16; ++j) {
    double col = 0.0;
    for (int i = 0; i < 16; ++i) col += dv.at(i, j);
    CHECK(std::abs(col) < 1e-10);
  }
  const Image dh = d_h(x);
  for (int i = 0; i < 16; ++i) {
    double row = 0.0;
    for (int j = 0; j < 16; ++j) row += dh.at(i, j);
    CHECK(std::abs(row) < 1e-10);
  }
}

TEST_CASE("difference operators are linear") {
  const Image x = oracle::random_image(10, 24, -1.0, 1.0);
  const Image y = oracle::random_image(10, 25, -1.0, 1.0);
  const double a = 1.7, b = -0.4;
  Image mix(10);
  for (size_t k = 0; k < mix.pixels.size(); ++k)
    mix.pixels[k] = a * x.pixels[k] + b * y.pixels[k];
  const Image lhs = d_v(mix);
  const Image dx = d_v(x), dy = d_v(y);
  for (size_t k = 0; k < lhs.pixels.size(); ++k)
    CHECK(lhs.pixels[k] == doctest::Approx(a * dx.pixels[k] + b * dy.pixels[k]).epsilon(1e-12));
}

TEST_CASE("tv_iso is positively homogeneous and detects constants") {
  const Image x = oracle::random_image(12, 26, -1.0, 1.0);
  CHECK(tv_iso(x) > 0.0);
  Image scaled = x;
  for (auto& v : scaled.pixels) v *= -2.5;
  CHECK(tv_iso(scaled) == doctest::Approx(2.5 * tv_iso(x)).epsilon(1e-12));
  CHECK(tv_iso(Image(12, -3.0)) == 0.0);
}

TEST_CASE("tv_iso of a single hot pixel matches the direct loop") {
  Image x(4, 0.0);
  x.at(1, 1) = 1.0;
  double ref = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double dv = x.at((i + 1) % 4, j) - x.at(i, j);
      const double dh = x.at(i, (j + 1) % 4) - x.at(i, j);
      ref += std::sqrt(dv * dv + dh * dh);
    }
  CHECK(tv_iso(x) == doctest::Approx(ref).epsilon(1e-12));
  // two unit steps into the pixel plus one diagonal pair out of it
  CHECK(ref == doctest::Approx(2.0 + std::sqrt(2.0)));
}

TEST_CASE("masked quadratic against a direct loop") {
  const Image x = oracle::random_image(8, 27, -1.0, 1.0);
  std::mt19937_64 rng(28);
  MaskPair masks = MaskPair::ones(8);
  for (auto& m : masks.vertical) m = rng() & 1;
  for (auto& m : masks.horizontal) m = rng() & 1;

  double ref = 0.0;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      const double dv = x.at((i + 1) % 8, j) - x.at(i, j);
      const double dh = x.at(i, (j + 1) % 8) - x.at(i, j);
      if (masks.vertical[static_cast<size_t>(i) * 8 + j]) ref += dv * dv;
      if (masks.horizontal[static_cast<size_t>(i) * 8 + j]) ref += dh * dh;
    }
  CHECK(masked_quadratic(x, masks) == doctest::Approx(ref).epsilon(1e-12));

  CHECK(masked_quadratic(x, MaskPair::zeros(8)) == 0.0);
  const double full = masked_quadratic(x, MaskPair::ones(8));
  const Image dv = d_v(x), dh = d_h(x);
  CHECK(full == doctest::Approx(dot(dv, dv) + dot(dh, dh)).epsilon(1e-12));
}

TEST_CASE("shrinking a mask never increases the masked quadratic") {
  const Image x = oracle::random_image(8, 29, -1.0, 1.0);
  MaskPair masks = MaskPair::ones(8);
  double prev = masked_quadratic(x, masks);
  std::mt19937_64 rng(30);
  for (int step = 0; step < 40; ++step) {
    const size_t k = rng() % masks.vertical.size();
    if (rng() & 1)
      masks.vertical[k] = 0;
    else
      masks.horizontal[k] = 0;
    const double cur = masked_quadratic(x, masks);
    CHECK(cur <= prev + 1e-15);
    prev = cur;
  }
}

TEST_CASE("masked quadratic rejects mismatched masks") {
  CHECK_THROWS_AS(masked_quadratic(Image(8, 0.0), MaskPair::ones(4)), std::invalid_argument);
}
