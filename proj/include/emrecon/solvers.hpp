#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "emrecon/diff_ops.hpp"
#include "emrecon/fourier.hpp"
#include "emrecon/image.hpp"

namespace emrecon {

/// Matrix-free self-adjoint positive (semi)definite operator on real
/// n-by-n fields.
struct LinearOperator {
  std::function<Image(const Image&)> apply;
  std::string descriptor;
};

struct SolverConfig {
  int max_outer_iterations = 300;
  int max_cg_iterations = 2000;
  double cg_tolerance = 1e-8;    // relative residual
  double outer_tolerance = 1e-6; // relative iterate change, outer loops
  double bregman_penalty = 20.0; // shrink threshold is its reciprocal
  double lambda = 1e-9;          // regularization weight
  double data_weight = 1.0;
  bool noiseless = true;         // enables the exact Fourier data projection
};

struct SolveReport {
  int iterations_used = 0;
  double final_residual = 0.0;
  std::vector<double> residual_trace;
  std::vector<double> objective_trace;
  bool converged = false;
};

/// Krylov solver for self-adjoint positive semidefinite systems, zero
/// initial guess. This is the conjugate-residual variant: it minimizes the
/// residual 2-norm over the Krylov space, so the recorded residuals are
/// non-increasing by construction (plain conjugate gradients does not
/// guarantee that). One operator application per iteration.
std::pair<Image, SolveReport> cg_solve(const LinearOperator& op, const Image& rhs,
                                       const SolverConfig& config);

/// Replace the sampled coefficients of x's spectrum with the measured
/// values and return the real part: the exact projection onto
/// { x : S F x = b }.
Image project_onto_data(const Image& x, const SampledData& data);

/// Least-squares solve of ||S F x - b||^2 + mu * (||M_v o D_v x||^2 +
/// ||M_h o D_h x||^2) by conjugate residuals on the normal equations;
/// in noiseless mode, finishes with the exact data projection.
std::pair<Image, SolveReport> masked_l2_solve(const SampledData& data, const MaskPair& masks,
                                              double mu, const SolverConfig& config);

/// The un-masked anisotropic quadratic reconstruction: masked_l2_solve with
/// all-ones masks and mu = config.lambda. Bit-identical to that call.
std::pair<Image, SolveReport> anisotropic_l2_reconstruct(const SampledData& data,
                                                         const SolverConfig& config);

/// Isotropic-TV reconstruction from partial Fourier data by split Bregman:
/// the quadratic subproblem is solved in closed form in Fourier space
/// (the periodic difference operators are circulant), followed by joint
/// soft shrinkage of the two difference fields. In noiseless mode every
/// outer iteration ends with the exact data projection. The objective
/// trace records the isotropic TV of each outer iterate.
std::pair<Image, SolveReport> tv_reconstruct(const SampledData& data,
                                             const SolverConfig& config);

/// Rows 'iteration,residual,objective'.
void save_solve_report_csv(const SolveReport& report, const std::string& path);

}  // namespace emrecon
