#include "emrecon/edge_mask.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace emrecon {

static double max_abs(const Image& a) {
  double m = 0.0;
  for (double v : a.pixels) m = std::max(m, std::abs(v));
  return m;
}

ThresholdParams compute_thresholds(const EdgeMap& edges, double k) {
  if (k < 0.0) throw std::invalid_argument("compute_thresholds: k must be >= 0");
  ThresholdParams p;
  p.k = k;
  const double scale = std::exp2(-k);
  p.tau_v = scale * max_abs(edges.vertical);
  p.tau_h = scale * max_abs(edges.horizontal);
  return p;
}

static std::vector<uint8_t> threshold_one(const Image& edge, double tau) {
  std::vector<uint8_t> mask(edge.pixels.size());
  for (size_t i = 0; i < edge.pixels.size(); ++i)
    mask[i] = std::abs(edge.pixels[i]) < tau ? 1 : 0;
  return mask;
}

MaskPair build_masks(const EdgeMap& edges, const ThresholdParams& params) {
  if (edges.vertical.n != edges.n || edges.horizontal.n != edges.n)
    throw std::invalid_argument("build_masks: edge map dimension mismatch");
  MaskPair m;
  m.n = edges.n;
  m.vertical = threshold_one(edges.vertical, params.tau_v);
  m.horizontal = threshold_one(edges.horizontal, params.tau_h);
  // no edges detected anywhere means regularize everywhere
  if (max_abs(edges.vertical) == 0.0) m.vertical.assign(m.vertical.size(), 1);
  if (max_abs(edges.horizontal) == 0.0) m.horizontal.assign(m.horizontal.size(), 1);
  return m;
}

MaskPair true_masks(const Image& ground_truth, double k) {
  const EdgeMap edges = edge_map(ground_truth);
  return build_masks(edges, compute_thresholds(edges, k));
}

void save_mask_pbm(const std::vector<uint8_t>& mask, int n, const std::string& path) {
  if (mask.size() != static_cast<size_t>(n) * n)
    throw std::invalid_argument("save_mask_pbm: size mismatch");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << "P4\n" << n << " " << n << "\n";
  const int row_bytes = (n + 7) / 8;
  for (int i = 0; i < n; ++i) {
    for (int byte = 0; byte < row_bytes; ++byte) {
      unsigned char packed = 0;
      for (int bit = 0; bit < 8; ++bit) {
        const int j = byte * 8 + bit;
        // PBM: 1 bit = black; paint detected edges (mask 0) black
        if (j < n && mask[static_cast<size_t>(i) * n + j] == 0) packed |= 0x80u >> bit;
      }
      f.put(static_cast<char>(packed));
    }
  }
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::vector<uint8_t> load_mask_pbm(const std::string& path, int* n_out) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::string magic;
  f >> magic;
  int w = 0, h = 0;
  f >> w >> h;
  if (magic != "P4" || w != h || w < 1)
    throw std::runtime_error(path + ": expected square binary PBM");
  f.get();  // single whitespace after height
  const int n = w;
  const int row_bytes = (n + 7) / 8;
  std::vector<uint8_t> mask(static_cast<size_t>(n) * n, 1);
  for (int i = 0; i < n; ++i) {
    for (int byte = 0; byte < row_bytes; ++byte) {
      const int c = f.get();
      if (c == EOF) throw std::runtime_error(path + ": truncated PBM payload");
      for (int bit = 0; bit < 8; ++bit) {
        const int j = byte * 8 + bit;
        if (j < n && (c & (0x80 >> bit))) mask[static_cast<size_t>(i) * n + j] = 0;
      }
    }
  }
  if (n_out) *n_out = n;
  return mask;
}

void save_mask_pair_csv(const MaskPair& masks, const std::string& path_v,
                        const std::string& path_h) {
  auto write = [&](const std::vector<uint8_t>& m, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    for (int i = 0; i < masks.n; ++i) {
      for (int j = 0; j < masks.n; ++j) {
        f << int(m[static_cast<size_t>(i) * masks.n + j]);
        f.put(j + 1 == masks.n ? '\n' : ',');
      }
    }
  };
  write(masks.vertical, path_v);
  write(masks.horizontal, path_h);
}

}  // namespace emrecon
