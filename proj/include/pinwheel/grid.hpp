#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace pw {

using Complex = std::complex<double>;

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct ShapeMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Square periodic window: n samples per axis over period p.
/// Sample j sits at x = (j - n/2) * p / n, so the origin is sample n/2.
struct GridSpec {
  int n = 64;
  double p = 64.0;

  double pixel_width() const { return p / n; }
  double coord(int j) const { return (j - n / 2) * pixel_width(); }
  int freq(int j) const { return j - n / 2; }
  void validate() const;
  bool operator==(const GridSpec&) const = default;
};

/// Mean of f over the frequencies that coincide with (kx, ky) on the samples: index -n/2 also stands for +n/2.
template <class F>
Complex alias_average(const GridSpec& g, int kx, int ky, F&& f) {
  const int h = g.n / 2;
  const bool ax = kx == -h, ay = ky == -h;
  Complex acc = f(kx, ky);
  if (ax) acc += f(h, ky);
  if (ay) acc += f(kx, h);
  if (ax && ay) acc += f(h, h);
  return acc / static_cast<double>((ax ? 2 : 1) * (ay ? 2 : 1));
}

/// Complex samples on a GridSpec. data(iy, ix).
struct SpatialGrid {
  GridSpec spec;
  Eigen::MatrixXcd data;

  SpatialGrid() = default;
  explicit SpatialGrid(const GridSpec& g) : spec(g), data(Eigen::MatrixXcd::Zero(g.n, g.n)) {}
};

/// Fourier coefficients on the signed range [-n/2, n/2-1]^2. coeffs(wy + n/2, wx + n/2).
struct SpectralGrid {
  GridSpec spec;
  Eigen::MatrixXcd coeffs;

  SpectralGrid() = default;
  explicit SpectralGrid(const GridSpec& g) : spec(g), coeffs(Eigen::MatrixXcd::Zero(g.n, g.n)) {}
};

void require_finite(const Complex& z, const char* what);
void require_finite(const Eigen::MatrixXcd& m, const char* what);

}  // namespace pw
