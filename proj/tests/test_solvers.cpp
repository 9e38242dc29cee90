#include <doctest.h>

#include <complex>
#include <filesystem>
#include <fstream>

#include "emrecon/solvers.hpp"
#include "oracles.hpp"

using namespace emrecon;

namespace {

double rel_err(const Image& x, const Image& truth) {
  double num = 0.0, den = 0.0;
  for (size_t k = 0; k < x.pixels.size(); ++k) {
    const double d = x.pixels[k] - truth.pixels[k];
    num += d * d;
    den += truth.pixels[k] * truth.pixels[k];
  }
  return std::sqrt(num / den);
}

LinearOperator dense_operator(const std::vector<double>& m, int n) {
  // m is (n*n) x (n*n), acting on vectorized images
  LinearOperator op;
  op.descriptor = "dense";
  op.apply = [m, n](const Image& x) {
    const size_t dim = x.pixels.size();
    Image out(n, 0.0);
    for (size_t r = 0; r < dim; ++r) {
      double acc = 0.0;
      for (size_t c = 0; c < dim; ++c) acc += m[r * dim + c] * x.pixels[c];
      out.pixels[r] = acc;
    }
    return out;
  };
  return op;
}

}  // namespace

TEST_CASE("identity system is solved in one iteration") {
  LinearOperator op;
  op.descriptor = "identity";
  op.apply = [](const Image& x) { return x; };
  const Image rhs = oracle::random_image(8, 41);
  SolverConfig cfg;
  const auto [x, report] = cg_solve(op, rhs, cfg);
  CHECK(report.converged);
  CHECK(report.iterations_used == 1);
  for (size_t k = 0; k < x.pixels.size(); ++k)
    CHECK(x.pixels[k] == doctest::Approx(rhs.pixels[k]).epsilon(1e-12));
}

TEST_CASE("diagonal system inverts elementwise") {
  const Image d = oracle::random_image(8, 42, 0.5, 3.0);
  LinearOperator op;
  op.descriptor = "diagonal";
  op.apply = [&d](const Image& x) {
    Image out = x;
    for (size_t k = 0; k < out.pixels.size(); ++k) out.pixels[k] *= d.pixels[k];
    return out;
  };
  const Image rhs = oracle::random_image(8, 43, -1.0, 1.0);
  SolverConfig cfg;
  const auto [x, report] = cg_solve(op, rhs, cfg);
  CHECK(report.converged);
  for (size_t k = 0; k < x.pixels.size(); ++k)
    CHECK(x.pixels[k] == doctest::Approx(rhs.pixels[k] / d.pixels[k]).epsilon(1e-6));
}

TEST_CASE("random SPD system matches dense elimination") {
  // A^T A + I on vectorized 4x4 images (16 unknowns)
  const int n = 4;
  const size_t dim = 16;
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> a(dim * dim);
  for (auto& v : a) v = dist(rng);
  std::vector<double> spd(dim * dim, 0.0);
  for (size_t i = 0; i < dim; ++i)
    for (size_t j = 0; j < dim; ++j) {
      double acc = (i == j) ? 1.0 : 0.0;
      for (size_t k = 0; k < dim; ++k) acc += a[k * dim + i] * a[k * dim + j];
      spd[i * dim + j] = acc;
    }

  const Image rhs = oracle::random_image(n, 45, -1.0, 1.0);
  SolverConfig cfg;
  cfg.cg_tolerance = 1e-12;
  const auto [x, report] = cg_solve(dense_operator(spd, n), rhs, cfg);
  CHECK(report.converged);

  const auto ref = oracle::dense_solve(spd, rhs.pixels);
  for (size_t k = 0; k < dim; ++k) CHECK(x.pixels[k] == doctest::Approx(ref[k]).epsilon(1e-8));
}

TEST_CASE("residual trace never increases") {
  const int n = 16;
  const size_t dim = static_cast<size_t>(n) * n;
  std::mt19937_64 rng(46);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> a(dim * dim);
  for (auto& v : a) v = dist(rng);
  std::vector<double> spd(dim * dim, 0.0);
  for (size_t i = 0; i < dim; ++i)
    for (size_t j = 0; j < dim; ++j) {
      double acc = (i == j) ? 1.0 : 0.0;
      for (size_t k = 0; k < dim; ++k) acc += a[k * dim + i] * a[k * dim + j];
      spd[i * dim + j] = acc;
    }
  SolverConfig cfg;
  cfg.cg_tolerance = 1e-12;
  cfg.max_cg_iterations = 400;
  const auto [x, report] = cg_solve(dense_operator(spd, n), oracle::random_image(n, 47), cfg);
  REQUIRE(report.residual_trace.size() > 2);
  for (size_t k = 1; k < report.residual_trace.size(); ++k)
    CHECK(report.residual_trace[k] <= report.residual_trace[k - 1] * (1.0 + 1e-14));
}

TEST_CASE("non-convergence is reported, not thrown") {
  const int n = 8;
  const size_t dim = 64;
  std::mt19937_64 rng(48);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> a(dim * dim);
  for (auto& v : a) v = dist(rng);
  std::vector<double> spd(dim * dim, 0.0);
  for (size_t i = 0; i < dim; ++i)
    for (size_t j = 0; j < dim; ++j) {
      double acc = (i == j) ? 1e-6 : 0.0;
      for (size_t k = 0; k < dim; ++k) acc += a[k * dim + i] * a[k * dim + j];
      spd[i * dim + j] = acc;
    }
  SolverConfig cfg;
  cfg.max_cg_iterations = 2;
  cfg.cg_tolerance = 1e-14;
  const auto [x, report] = cg_solve(dense_operator(spd, n), oracle::random_image(n, 49), cfg);
  CHECK_FALSE(report.converged);
  CHECK(report.iterations_used == 2);
}

TEST_CASE("NaN in the operator output raises an error") {
  LinearOperator op;
  op.descriptor = "broken";
  op.apply = [](const Image& x) {
    Image out = x;
    out.pixels[0] = std::numeric_limits<double>::quiet_NaN();
    return out;
  };
  SolverConfig cfg;
  CHECK_THROWS_AS(cg_solve(op, Image(4, 1.0), cfg), std::runtime_error);
}

TEST_CASE("cg is deterministic") {
  const Image d = oracle::random_image(8, 50, 0.5, 2.0);
  LinearOperator op;
  op.descriptor = "diagonal";
  op.apply = [&d](const Image& x) {
    Image out = x;
    for (size_t k = 0; k < out.pixels.size(); ++k) out.pixels[k] *= d.pixels[k];
    return out;
  };
  const Image rhs = oracle::random_image(8, 51);
  SolverConfig cfg;
  const auto [x1, r1] = cg_solve(op, rhs, cfg);
  const auto [x2, r2] = cg_solve(op, rhs, cfg);
  CHECK(x1 == x2);
  CHECK(r1.residual_trace == r2.residual_trace);
}

TEST_CASE("tv reconstruction recovers the image from complete data") {
  const Image truth = shepp_logan(32);
  const SampledData data = sample(dft2(truth), full_pattern(32));
  SolverConfig cfg;
  cfg.max_outer_iterations = 30;
  const auto [x, report] = tv_reconstruct(data, cfg);
  CHECK(rel_err(x, truth) <= 1e-8);
}

TEST_CASE("tv objective trace settles monotonically") {
  const Image truth = shepp_logan(64);
  const SampledData data = sample(dft2(truth), radial_pattern(64, 12));
  SolverConfig cfg;
  cfg.max_outer_iterations = 120;
  const auto [x, report] = tv_reconstruct(data, cfg);
  REQUIRE(report.objective_trace.size() > 6);
  for (size_t k = 6; k < report.objective_trace.size(); ++k)
    CHECK(report.objective_trace[k] <= report.objective_trace[k - 1] * (1.0 + 1e-9));
}

TEST_CASE("noiseless tv output is exactly data consistent") {
  const Image truth = shepp_logan(64);
  const SampledData data = sample(dft2(truth), radial_pattern(64, 10));
  SolverConfig cfg;
  cfg.max_outer_iterations = 40;
  const auto [x, report] = tv_reconstruct(data, cfg);
  const SampledData resampled = sample(dft2(x), data.pattern);
  for (size_t k = 0; k < data.values.size(); ++k)
    CHECK(std::abs(resampled.values[k] - data.values[k]) < 1e-10);
}

TEST_CASE("tv reconstruction is deterministic") {
  const Image truth = shepp_logan(32);
  const SampledData data = sample(dft2(truth), radial_pattern(32, 8));
  SolverConfig cfg;
  cfg.max_outer_iterations = 25;
  const auto [x1, r1] = tv_reconstruct(data, cfg);
  const auto [x2, r2] = tv_reconstruct(data, cfg);
  CHECK(x1 == x2);
  CHECK(r1.objective_trace == r2.objective_trace);
}

TEST_CASE("anisotropic solve with a DC-only pattern and huge lambda is constant") {
  const Image truth = shepp_logan(16);
  const SampledData data = sample(dft2(truth), radial_pattern(16, 0));
  SolverConfig cfg;
  cfg.lambda = 1e8;
  cfg.noiseless = false;
  cfg.max_cg_iterations = 4000;
  const auto [x, report] = anisotropic_l2_reconstruct(data, cfg);
  double mean = 0.0;
  for (double v : truth.pixels) mean += v;
  mean /= truth.pixels.size();
  for (double v : x.pixels) CHECK(v == doctest::Approx(mean).epsilon(1e-4));
}

TEST_CASE("anisotropic solve matches the dense normal equations on full data") {
  const int n = 8;
  const Image truth = oracle::random_image(n, 52);
  const SampledData data = sample(dft2(truth), full_pattern(n));
  const double lambda = 1e-3;

  SolverConfig cfg;
  cfg.lambda = lambda;
  cfg.noiseless = false;
  cfg.cg_tolerance = 1e-12;
  const auto [x, report] = anisotropic_l2_reconstruct(data, cfg);

  // dense oracle: (Re F^H S^H S F + lambda (Dv^T Dv + Dh^T Dh)) x = Re F^H S^H b.
  // With full sampling the data operator is the identity.
  const size_t dim = static_cast<size_t>(n) * n;
  std::vector<double> sys(dim * dim, 0.0);
  const auto dmat = dense_difference_matrix(n);
  // Dv acts as kron(D, I), Dh as kron(I, D) on row-major vectorized images
  for (size_t r = 0; r < dim; ++r) {
    const size_t ri = r / n, rj = r % n;
    sys[r * dim + r] += 1.0;
    for (size_t c = 0; c < dim; ++c) {
      const size_t ci = c / n, cj = c % n;
      double dv = 0.0, dh = 0.0;
      if (rj == cj)
        for (size_t k = 0; k < static_cast<size_t>(n); ++k)
          dv += dmat[k * n + ri] * dmat[k * n + ci];
      if (ri == ci)
        for (size_t k = 0; k < static_cast<size_t>(n); ++k)
          dh += dmat[k * n + rj] * dmat[k * n + cj];
      sys[r * dim + c] += lambda * (dv + dh);
    }
  }
  const Image rhs = real_part(idft2(sample_adjoint(data)));
  const auto ref = oracle::dense_solve(sys, rhs.pixels);
  for (size_t k = 0; k < dim; ++k) CHECK(x.pixels[k] == doctest::Approx(ref[k]).epsilon(1e-8));
}

TEST_CASE("solve report csv is written") {
  SolveReport rep;
  rep.residual_trace = {0.5, 0.25};
  rep.objective_trace = {2.0, 1.0};
  const std::string path = "/tmp/emrecon_trace_test.csv";
  save_solve_report_csv(rep, path);
  std::ifstream f(path);
  std::string header;
  std::getline(f, header);
  CHECK(header == "iteration,residual,objective");
  std::string row;
  std::getline(f, row);
  CHECK(row.substr(0, 2) == "1,");
  std::filesystem::remove(path);
}
