#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pinwheel/transforms.hpp"

namespace pw {

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Spectra file:
///   "PWSP" | u32 version | u32 kind | u32 ndim | u64 dims[ndim] | u32 nmeta | f64 meta[nmeta] | f64 (re, im) ...
/// All little-endian; data row-major over dims (last index fastest).
struct SpectraFile {
  enum Kind : std::uint32_t { Filter = 1, Joint = 2, Grid = 3 };
  static constexpr std::uint32_t kVersion = 1;

  std::uint32_t kind = Filter;
  std::vector<std::uint64_t> dims;
  std::vector<double> meta;
  std::vector<Complex> data;
};

void write_spectra(const std::string& path, const SpectraFile& f);
SpectraFile read_spectra(const std::string& path);

/// dims (channels_in, channels_out); meta (K, omega_max, omega_step, alpha_rho, alpha_r).
SpectraFile to_spectra_file(const FilterSpectrum& f);
FilterSpectrum filter_from_spectra_file(const SpectraFile& f);
/// dims (n, n, channels) over (ky, kx, channel); meta (K, omega_max, omega_step, alpha_rho, alpha_r, p, alpha, sign).
SpectraFile to_spectra_file(const JointSpectrum& s);
JointSpectrum joint_from_spectra_file(const SpectraFile& f);
/// dims (n, n) over (ky, kx); meta (p).
SpectraFile to_spectra_file(const SpectralGrid& s);

/// 16-bit binary PGM ("P5", maxval 65535, big-endian). img(iy, ix) with y growing upwards; the top file row is
/// the largest y. Values are scaled by 65535 / vmax (vmax <= 0 selects the image maximum) and clamped to [0, 65535].
void write_pgm16(const std::string& path, const Eigen::MatrixXd& img, double vmax = 0.0);
Eigen::MatrixXi read_pgm16(const std::string& path);

/// 8-bit binary PPM ("P6"): hue = phase (0 rad is red), value = magnitude / max magnitude.
void write_phase_ppm(const std::string& path, const Eigen::MatrixXcd& img);

/// Writes through a temporary file and renames it into place.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace pw
