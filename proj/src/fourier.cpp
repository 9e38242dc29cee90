#include "emrecon/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>

namespace emrecon {

namespace {

// One FFTW plan pair per grid size, created with FFTW_ESTIMATE so the plan
// choice (and therefore the output bit pattern) never depends on timing.
// FFTW planning and execution on the shared buffers are serialized.
struct PlanEntry {
  fftw_complex* in;
  fftw_complex* out;
  fftw_plan forward;
  fftw_plan backward;
};

std::mutex plan_mutex;
std::map<int, PlanEntry>& plan_cache() {
  static std::map<int, PlanEntry> cache;
  return cache;
}

PlanEntry& plans_for(int n) {
  auto& cache = plan_cache();
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  PlanEntry e;
  const size_t m = static_cast<size_t>(n) * n;
  e.in = fftw_alloc_complex(m);
  e.out = fftw_alloc_complex(m);
  e.forward = fftw_plan_dft_2d(n, n, e.in, e.out, FFTW_FORWARD, FFTW_ESTIMATE);
  e.backward = fftw_plan_dft_2d(n, n, e.in, e.out, FFTW_BACKWARD, FFTW_ESTIMATE);
  return cache.emplace(n, e).first->second;
}

void run_transform(int n, const std::complex<double>* src, std::complex<double>* dst,
                   bool forward) {
  std::lock_guard<std::mutex> lock(plan_mutex);
  PlanEntry& e = plans_for(n);
  const size_t m = static_cast<size_t>(n) * n;
  for (size_t k = 0; k < m; ++k) {
    e.in[k][0] = src[k].real();
    e.in[k][1] = src[k].imag();
  }
  fftw_execute(forward ? e.forward : e.backward);
  const double scale = 1.0 / n;  // unitary in each direction
  for (size_t k = 0; k < m; ++k)
    dst[k] = std::complex<double>(e.out[k][0] * scale, e.out[k][1] * scale);
}

}  // namespace

Spectrum dft2(const Image& img) {
  if (img.n < 1) throw std::invalid_argument("dft2: empty image");
  const size_t m = img.pixels.size();
  std::vector<std::complex<double>> in(m);
  for (size_t k = 0; k < m; ++k) in[k] = img.pixels[k];
  Spectrum spec(img.n);
  run_transform(img.n, in.data(), spec.coeffs.data(), true);
  return spec;
}

ComplexField idft2(const Spectrum& spec) {
  if (spec.n < 1) throw std::invalid_argument("idft2: empty spectrum");
  ComplexField f(spec.n);
  run_transform(spec.n, spec.coeffs.data(), f.values.data(), false);
  return f;
}

Image real_part(const ComplexField& f) {
  Image img(f.n);
  for (size_t k = 0; k < f.values.size(); ++k) img.pixels[k] = f.values[k].real();
  return img;
}

double max_imag_abs(const ComplexField& f) {
  double m = 0.0;
  for (const auto& v : f.values) m = std::max(m, std::abs(v.imag()));
  return m;
}

static int canonical_freq(int f, int n) {
  // reduce mod n into {-ceil(n/2)+1, ..., floor(n/2)}
  int r = ((f % n) + n) % n;
  if (r > n / 2) r -= n;
  return r;
}

SamplingPattern radial_pattern(int n, int lines) {
  if (n < 1) throw std::invalid_argument("radial_pattern: n must be >= 1");
  if (lines < 0) throw std::invalid_argument("radial_pattern: lines must be >= 0");
  std::set<std::pair<int, int>> pts;
  pts.insert({0, 0});
  const double pi = std::acos(-1.0);
  const int tmax = n / 2;
  for (int l = 0; l < lines; ++l) {
    const double theta = pi * l / lines;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    for (int t = -tmax; t <= tmax; ++t) {
      const int p = canonical_freq(static_cast<int>(std::lround(t * c)), n);
      const int q = canonical_freq(static_cast<int>(std::lround(t * s)), n);
      pts.insert({p, q});
    }
  }
  SamplingPattern pat;
  pat.n = n;
  pat.line_count = lines;
  pat.indices.assign(pts.begin(), pts.end());
  return pat;
}

SamplingPattern full_pattern(int n) {
  if (n < 1) throw std::invalid_argument("full_pattern: n must be >= 1");
  SamplingPattern pat;
  pat.n = n;
  pat.line_count = n;
  pat.indices.reserve(static_cast<size_t>(n) * n);
  const int lo = -((n + 1) / 2) + 1;  // -ceil(n/2)+1
  const int hi = n / 2;
  for (int p = lo; p <= hi; ++p)
    for (int q = lo; q <= hi; ++q) pat.indices.emplace_back(p, q);
  std::sort(pat.indices.begin(), pat.indices.end());
  return pat;
}

SampledData sample(const Spectrum& spec, const SamplingPattern& pattern) {
  if (spec.n != pattern.n) throw std::invalid_argument("sample: dimension mismatch");
  SampledData data;
  data.pattern = pattern;
  data.values.reserve(pattern.indices.size());
  for (const auto& [p, q] : pattern.indices) data.values.push_back(spec.at(p, q));
  return data;
}

Spectrum sample_adjoint(const SampledData& data) {
  Spectrum spec(data.pattern.n);
  if (data.values.size() != data.pattern.indices.size())
    throw std::invalid_argument("sample_adjoint: value/index count mismatch");
  for (size_t k = 0; k < data.values.size(); ++k) {
    const auto& [p, q] = data.pattern.indices[k];
    spec.at(p, q) = data.values[k];
  }
  return spec;
}

double GaussianStream::next() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // 53-bit uniforms in (0,1]; u1 > 0 keeps the log finite
  const double u1 = ((engine_() >> 11) + 1.0) * 0x1p-53;
  const double u2 = (engine_() >> 11) * 0x1p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double two_pi = 2.0 * std::acos(-1.0);
  spare_ = r * std::sin(two_pi * u2);
  have_spare_ = true;
  return r * std::cos(two_pi * u2);
}

SampledData add_noise(const SampledData& data, double sigma, uint64_t seed) {
  if (sigma < 0.0) throw std::invalid_argument("add_noise: sigma must be >= 0");
  if (sigma == 0.0) return data;
  SampledData out = data;
  GaussianStream g(seed);
  for (auto& v : out.values) {
    const double re = g.next();
    const double im = g.next();
    v += std::complex<double>(sigma * re, sigma * im);
  }
  return out;
}

void save_sampled_data_csv(const SampledData& data, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << "# n=" << data.pattern.n << " lines=" << data.pattern.line_count << "\n";
  f << "p,q,re,im\n";
  char buf[96];
  for (size_t k = 0; k < data.values.size(); ++k) {
    const auto& [p, q] = data.pattern.indices[k];
    std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", p, q, data.values[k].real(),
                  data.values[k].imag());
    f << buf;
  }
  if (!f) throw std::runtime_error("write failed: " + path);
}

SampledData load_sampled_data_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error(path + ": empty data file");
  SampledData data;
  data.pattern.n = 0;
  data.pattern.line_count = 0;
  if (!line.empty() && line[0] == '#') {
    std::istringstream meta(line.substr(1));
    std::string tok;
    while (meta >> tok) {
      if (tok.rfind("n=", 0) == 0) data.pattern.n = std::stoi(tok.substr(2));
      if (tok.rfind("lines=", 0) == 0) data.pattern.line_count = std::stoi(tok.substr(6));
    }
    if (!std::getline(f, line)) throw std::runtime_error(path + ": missing header");
  }
  if (line != "p,q,re,im") throw std::runtime_error(path + ": expected header p,q,re,im");
  if (data.pattern.n < 1)
    throw std::runtime_error(path + ": missing '# n=... lines=...' metadata line");
  const int n = data.pattern.n;
  const int lo = -((n + 1) / 2) + 1;
  const int hi = n / 2;
  std::set<std::pair<int, int>> seen;
  size_t lineno = 2;  // metadata + header already consumed
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() && f.eof()) break;
    int p = 0, q = 0;
    double re = 0.0, im = 0.0;
    if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf", &p, &q, &re, &im) != 4)
      throw std::runtime_error(path + ": parse error at line " + std::to_string(lineno));
    if (p < lo || p > hi || q < lo || q > hi)
      throw std::runtime_error(path + ": frequency out of range at line " +
                               std::to_string(lineno));
    if (!seen.insert({p, q}).second)
      throw std::runtime_error(path + ": duplicate frequency at line " + std::to_string(lineno));
    if (!std::isfinite(re) || !std::isfinite(im))
      throw std::runtime_error(path + ": non-finite value at line " + std::to_string(lineno));
    data.pattern.indices.emplace_back(p, q);
    data.values.emplace_back(re, im);
  }
  if (!seen.count({0, 0})) throw std::runtime_error(path + ": DC sample missing");
  return data;
}

}  // namespace emrecon
