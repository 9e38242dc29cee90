#pragma once

#include <string>

#include "emrecon/diff_ops.hpp"
#include "emrecon/image.hpp"

namespace emrecon {

/// tau = 2^{-k} * max|edge value|, one threshold per orientation.
/// k is a nonnegative real exponent; k = 5 marks everything above 3.125%
/// of the maximum edge magnitude as an edge.
struct ThresholdParams {
  double k = 5.0;
  double tau_v = 0.0;
  double tau_h = 0.0;
};

ThresholdParams compute_thresholds(const EdgeMap& edges, double k);

/// Mask entry is 1 where |edge| < tau (strict), else 0. A degenerate
/// all-zero edge map (tau = 0) would mask everything under the strict
/// inequality; that case is overridden to all-ones, since an image with no
/// detected edges should be regularized everywhere.
MaskPair build_masks(const EdgeMap& edges, const ThresholdParams& params);

/// Masks computed from the ground truth's own difference transforms.
/// Oracle for tests and for perfect-mask experiments.
MaskPair true_masks(const Image& ground_truth, double k);

// inspection formats: portable bitmap (P4, 1 bit/pixel) and 0/1 CSV
void save_mask_pbm(const std::vector<uint8_t>& mask, int n, const std::string& path);
std::vector<uint8_t> load_mask_pbm(const std::string& path, int* n_out);
void save_mask_pair_csv(const MaskPair& masks, const std::string& path_v,
                        const std::string& path_h);

}  // namespace emrecon
