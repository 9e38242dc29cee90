#include "emrecon/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace emrecon {

const std::vector<Ellipse>& shepp_logan_ellipses() {
  static const double deg = std::acos(-1.0) / 180.0;
  // {cx, cy, a, b, rotation, delta}; see docs/phantom.md
  static const std::vector<Ellipse> table = {
      {0.0, 0.0, 0.69, 0.92, 0.0, 1.0},
      {0.0, -0.0184, 0.6624, 0.874, 0.0, -0.8},
      {0.22, 0.0, 0.11, 0.31, -18.0 * deg, -0.2},
      {-0.22, 0.0, 0.16, 0.41, 18.0 * deg, -0.2},
      {0.0, 0.35, 0.21, 0.25, 0.0, 0.1},
      {0.0, 0.1, 0.046, 0.046, 0.0, 0.1},
      {0.0, -0.1, 0.046, 0.046, 0.0, 0.1},
      {-0.08, -0.605, 0.046, 0.023, 0.0, 0.1},
      {0.0, -0.606, 0.023, 0.023, 0.0, 0.1},
      {0.06, -0.605, 0.023, 0.046, 0.0, 0.1},
  };
  return table;
}

static bool inside(const Ellipse& e, double x, double y) {
  const double dx = x - e.center_x;
  const double dy = y - e.center_y;
  const double c = std::cos(e.rotation);
  const double s = std::sin(e.rotation);
  const double u = c * dx + s * dy;
  const double v = -s * dx + c * dy;
  const double ra = u / e.semi_axis_a;
  const double rb = v / e.semi_axis_b;
  return ra * ra + rb * rb <= 1.0;
}

Image shepp_logan(int n) {
  if (n < 1) throw std::invalid_argument("shepp_logan: n must be >= 1");
  const auto& ellipses = shepp_logan_ellipses();
  Image img(n);
  for (int i = 0; i < n; ++i) {
    const double y = 1.0 - (2.0 * i + 1.0) / n;
    for (int j = 0; j < n; ++j) {
      const double x = -1.0 + (2.0 * j + 1.0) / n;
      // the deltas are exact tenths; accumulating in tenths keeps the
      // cancellations exact, so e.g. the ventricles are exactly zero
      double tenths = 0.0;
      for (const auto& e : ellipses)
        if (inside(e, x, y)) tenths += e.intensity_delta * 10.0;
      img.at(i, j) = tenths / 10.0;
    }
  }
  return img;
}

std::vector<double> cross_section(const Image& img, Orientation orient, int index) {
  if (index < 0 || index >= img.n)
    throw std::out_of_range("cross_section: index out of range");
  std::vector<double> out(static_cast<size_t>(img.n));
  if (orient == Orientation::horizontal) {
    for (int j = 0; j < img.n; ++j) out[j] = img.at(index, j);
  } else {
    for (int i = 0; i < img.n; ++i) out[i] = img.at(i, index);
  }
  return out;
}

void save_image_csv(const Image& img, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  char buf[40];
  for (int i = 0; i < img.n; ++i) {
    for (int j = 0; j < img.n; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", img.at(i, j));
      f << buf;
      f.put(j + 1 == img.n ? '\n' : ',');
    }
  }
  if (!f) throw std::runtime_error("write failed: " + path);
}

Image load_image_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() && f.eof()) break;
    std::vector<double> row;
    size_t pos = 0;
    while (pos <= line.size()) {
      const size_t comma = line.find(',', pos);
      const std::string tok =
          line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      size_t used = 0;
      double v;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        throw std::runtime_error(path + ": parse error at line " + std::to_string(lineno));
      }
      if (used != tok.size() || !std::isfinite(v))
        throw std::runtime_error(path + ": parse error at line " + std::to_string(lineno));
      row.push_back(v);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(path + ": empty image file");
  const size_t n = rows.size();
  for (const auto& r : rows)
    if (r.size() != n)
      throw std::runtime_error(path + ": not a square image (" + std::to_string(rows.size()) +
                               " rows, row of " + std::to_string(r.size()) + " values)");
  Image img(static_cast<int>(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) img.at(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
  return img;
}

void save_image_pgm(const Image& img, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << "P5\n" << img.n << " " << img.n << "\n255\n";
  for (double v : img.pixels) {
    const double c = std::clamp(v, 0.0, 1.0);
    f.put(static_cast<char>(static_cast<unsigned char>(std::lround(c * 255.0))));
  }
  if (!f) throw std::runtime_error("write failed: " + path);
}

static int pgm_next_int(std::istream& f, const std::string& path) {
  // skip whitespace and '#' comments between header tokens
  int c = f.get();
  while (c != EOF && (std::isspace(c) || c == '#')) {
    if (c == '#')
      while (c != EOF && c != '\n') c = f.get();
    c = f.get();
  }
  std::string tok;
  while (c != EOF && !std::isspace(c)) {
    tok.push_back(static_cast<char>(c));
    c = f.get();
  }
  try {
    size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(path + ": malformed PGM header");
  }
}

Image load_image_pgm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  char m0 = 0, m1 = 0;
  f.get(m0);
  f.get(m1);
  if (m0 != 'P' || m1 != '5') throw std::runtime_error(path + ": not a binary PGM (P5)");
  const int w = pgm_next_int(f, path);
  const int h = pgm_next_int(f, path);
  const int maxval = pgm_next_int(f, path);
  if (w != h) throw std::runtime_error(path + ": non-square PGM rejected");
  if (w < 1 || maxval != 255) throw std::runtime_error(path + ": unsupported PGM header");
  Image img(w);
  std::vector<unsigned char> raw(static_cast<size_t>(w) * h);
  f.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<size_t>(f.gcount()) != raw.size())
    throw std::runtime_error(path + ": truncated PGM payload");
  for (size_t k = 0; k < raw.size(); ++k) img.pixels[k] = raw[k] / 255.0;
  return img;
}

static bool has_suffix(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

void save_image(const Image& img, const std::string& path) {
  if (has_suffix(path, ".pgm"))
    save_image_pgm(img, path);
  else
    save_image_csv(img, path);
}

Image load_image(const std::string& path) {
  if (has_suffix(path, ".pgm")) return load_image_pgm(path);
  return load_image_csv(path);
}

double dot(const Image& a, const Image& b) {
  double s = 0.0;
  for (size_t k = 0; k < a.pixels.size(); ++k) s += a.pixels[k] * b.pixels[k];
  return s;
}

double norm2(const Image& a) { return std::sqrt(dot(a, a)); }

}  // namespace emrecon
