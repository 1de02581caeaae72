#include "pinwheel/formats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace pw {

namespace {

static_assert(std::endian::native == std::endian::little, "spectra I/O assumes a little-endian host");

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Cursor {
 public:
  explicit Cursor(const std::string& s) : s_(s) {}
  template <class T>
  T get() {
    if (pos_ + sizeof(T) > s_.size()) throw FormatError("spectra file truncated");
    T v;
    std::memcpy(&v, s_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::size_t remaining() const { return s_.size() - pos_; }
  std::string take(std::size_t n) {
    if (pos_ + n > s_.size()) throw FormatError("spectra file truncated");
    std::string r = s_.substr(pos_, n);
    pos_ += n;
    return r;
  }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;
};

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void freq_meta(const FrequencyConfig& c, std::vector<double>& m) {
  m.push_back(c.max_abs_angular());
  m.push_back(-c.radial.front());
  m.push_back(c.d_omega());
  m.push_back(c.alpha_rho);
  m.push_back(c.alpha_r);
}

FrequencyConfig freq_from_meta(const std::vector<double>& m) {
  if (m.size() < 5) throw FormatError("spectra metadata too short");
  return FrequencyConfig::make(static_cast<int>(m[0]), m[1], m[2], m[3], m[4]);
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write '" + tmp + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw FormatError("write failed for '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

void write_spectra(const std::string& path, const SpectraFile& f) {
  std::uint64_t count = 1;
  for (auto d : f.dims) count *= d;
  if (count != f.data.size()) throw FormatError("spectra dims do not match data length");
  std::string out = "PWSP";
  put<std::uint32_t>(out, SpectraFile::kVersion);
  put<std::uint32_t>(out, f.kind);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(f.dims.size()));
  for (auto d : f.dims) put<std::uint64_t>(out, d);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(f.meta.size()));
  for (double m : f.meta) put<double>(out, m);
  out.reserve(out.size() + f.data.size() * 16);
  for (const Complex& z : f.data) {
    put<double>(out, z.real());
    put<double>(out, z.imag());
  }
  write_file_atomic(path, out);
}

SpectraFile read_spectra(const std::string& path) {
  const std::string s = read_all(path);
  Cursor c(s);
  if (c.take(4) != "PWSP") throw FormatError("bad spectra magic");
  if (c.get<std::uint32_t>() != SpectraFile::kVersion) throw FormatError("unsupported spectra version");
  SpectraFile f;
  f.kind = c.get<std::uint32_t>();
  const auto nd = c.get<std::uint32_t>();
  std::uint64_t count = 1;
  for (std::uint32_t i = 0; i < nd; ++i) {
    f.dims.push_back(c.get<std::uint64_t>());
    count *= f.dims.back();
  }
  const auto nm = c.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < nm; ++i) f.meta.push_back(c.get<double>());
  if (c.remaining() != count * 16) throw FormatError("spectra payload length mismatch");
  f.data.resize(count);
  for (auto& z : f.data) {
    const double re = c.get<double>();
    z = Complex(re, c.get<double>());
  }
  return f;
}

SpectraFile to_spectra_file(const FilterSpectrum& g) {
  SpectraFile f;
  f.kind = SpectraFile::Filter;
  const auto C = static_cast<std::uint64_t>(g.config.channels());
  f.dims = {C, C};
  freq_meta(g.config, f.meta);
  f.data.reserve(C * C);
  for (std::uint64_t i = 0; i < C; ++i)
    for (std::uint64_t o = 0; o < C; ++o) f.data.push_back(g.coeffs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(o)));
  return f;
}

FilterSpectrum filter_from_spectra_file(const SpectraFile& f) {
  if (f.kind != SpectraFile::Filter || f.dims.size() != 2 || f.dims[0] != f.dims[1])
    throw FormatError("not a filter spectra file");
  FilterSpectrum g;
  g.config = freq_from_meta(f.meta);
  const auto C = static_cast<Eigen::Index>(f.dims[0]);
  if (C != g.config.channels()) throw FormatError("filter dims disagree with frequency metadata");
  g.coeffs.resize(C, C);
  for (Eigen::Index i = 0; i < C; ++i)
    for (Eigen::Index o = 0; o < C; ++o) g.coeffs(i, o) = f.data[static_cast<std::size_t>(i * C + o)];
  return g;
}

SpectraFile to_spectra_file(const JointSpectrum& s) {
  SpectraFile f;
  f.kind = SpectraFile::Joint;
  const auto n = static_cast<std::uint64_t>(s.spec.n), C = static_cast<std::uint64_t>(s.config.channels());
  f.dims = {n, n, C};
  freq_meta(s.config, f.meta);
  f.meta.push_back(s.spec.p);
  f.meta.push_back(s.alpha);
  f.meta.push_back(s.sign);
  f.data.reserve(n * n * C);
  for (std::uint64_t k = 0; k < n * n; ++k)
    for (std::uint64_t c = 0; c < C; ++c) f.data.push_back(s.coeffs(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)));
  return f;
}

JointSpectrum joint_from_spectra_file(const SpectraFile& f) {
  if (f.kind != SpectraFile::Joint || f.dims.size() != 3 || f.meta.size() != 8) throw FormatError("not a joint spectra file");
  JointSpectrum s;
  s.config = freq_from_meta(f.meta);
  s.spec = {static_cast<int>(f.dims[0]), f.meta[5]};
  s.alpha = f.meta[6];
  s.sign = static_cast<int>(f.meta[7]);
  const auto K = static_cast<Eigen::Index>(f.dims[0] * f.dims[1]), C = static_cast<Eigen::Index>(f.dims[2]);
  s.coeffs.resize(K, C);
  for (Eigen::Index k = 0; k < K; ++k)
    for (Eigen::Index c = 0; c < C; ++c) s.coeffs(k, c) = f.data[static_cast<std::size_t>(k * C + c)];
  return s;
}

SpectraFile to_spectra_file(const SpectralGrid& s) {
  SpectraFile f;
  f.kind = SpectraFile::Grid;
  const auto n = static_cast<std::uint64_t>(s.spec.n);
  f.dims = {n, n};
  f.meta = {s.spec.p};
  for (int iy = 0; iy < s.spec.n; ++iy)
    for (int ix = 0; ix < s.spec.n; ++ix) f.data.push_back(s.coeffs(iy, ix));
  return f;
}

void write_pgm16(const std::string& path, const Eigen::MatrixXd& img, double vmax) {
  if (vmax <= 0.0) vmax = img.size() ? img.maxCoeff() : 0.0;
  const double scale = vmax > 0.0 ? 65535.0 / vmax : 0.0;
  std::string out = "P5\n" + std::to_string(img.cols()) + " " + std::to_string(img.rows()) + "\n65535\n";
  for (Eigen::Index iy = img.rows() - 1; iy >= 0; --iy)
    for (Eigen::Index ix = 0; ix < img.cols(); ++ix) {
      const double v = std::isfinite(img(iy, ix)) ? img(iy, ix) * scale : 0.0;
      const auto q = static_cast<std::uint16_t>(std::clamp(std::lround(v), 0L, 65535L));
      out.push_back(static_cast<char>(q >> 8));
      out.push_back(static_cast<char>(q & 0xff));
    }
  write_file_atomic(path, out);
}

Eigen::MatrixXi read_pgm16(const std::string& path) {
  const std::string s = read_all(path);
  std::istringstream hs(s);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  hs >> magic >> w >> h >> maxval;
  if (magic != "P5" || maxval != 65535 || w <= 0 || h <= 0) throw FormatError("not a 16-bit P5 image");
  const auto off = static_cast<std::size_t>(hs.tellg()) + 1;
  if (s.size() != off + static_cast<std::size_t>(w) * h * 2) throw FormatError("PGM payload length mismatch");
  Eigen::MatrixXi img(h, w);
  std::size_t p = off;
  for (int iy = h - 1; iy >= 0; --iy)
    for (int ix = 0; ix < w; ++ix, p += 2)
      img(iy, ix) = (static_cast<unsigned char>(s[p]) << 8) | static_cast<unsigned char>(s[p + 1]);
  return img;
}

void write_phase_ppm(const std::string& path, const Eigen::MatrixXcd& img) {
  const double mmax = img.size() ? img.cwiseAbs().maxCoeff() : 0.0;
  std::string out = "P6\n" + std::to_string(img.cols()) + " " + std::to_string(img.rows()) + "\n255\n";
  for (Eigen::Index iy = img.rows() - 1; iy >= 0; --iy)
    for (Eigen::Index ix = 0; ix < img.cols(); ++ix) {
      const Complex z = img(iy, ix);
      double hue = std::arg(z) / (2.0 * std::numbers::pi);
      if (hue < 0) hue += 1.0;
      const double v = mmax > 0.0 ? std::abs(z) / mmax : 0.0;
      // HSV with full saturation.
      const double h6 = hue * 6.0;
      const int sector = static_cast<int>(h6) % 6;
      const double f = h6 - std::floor(h6);
      const double q = v * (1.0 - f), t = v * f;
      double r = 0, g = 0, b = 0;
      switch (sector) {
        case 0: r = v; g = t; b = 0; break;
        case 1: r = q; g = v; b = 0; break;
        case 2: r = 0; g = v; b = t; break;
        case 3: r = 0; g = q; b = v; break;
        case 4: r = t; g = 0; b = v; break;
        default: r = v; g = 0; b = q; break;
      }
      for (double c : {r, g, b}) out.push_back(static_cast<char>(std::clamp(std::lround(c * 255.0), 0L, 255L)));
    }
  write_file_atomic(path, out);
}

}  // namespace pw
