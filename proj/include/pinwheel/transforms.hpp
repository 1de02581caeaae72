#pragma once

#include <vector>

#include "pinwheel/grid.hpp"

namespace pw {

struct NyquistError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Frequency sets for the AFMT axes. Channel c = ia * n_rad() + ir.
struct FrequencyConfig {
  std::vector<int> angular;    // contiguous, e.g. [-K, K-1]
  std::vector<double> radial;  // uniform step
  double alpha_rho = -1.0;     // position envelope (input side)
  double alpha_r = 0.0;        // velocity envelope (output side)

  /// angular = [-K, K-1], radial = -omega_max, -omega_max + step, ..., omega_max - step.
  static FrequencyConfig make(int K, double omega_max, double step, double alpha_rho, double alpha_r);
  static FrequencyConfig desk() { return make(8, 4.0, 0.5, -1.0, 0.0); }

  int n_ang() const { return static_cast<int>(angular.size()); }
  int n_rad() const { return static_cast<int>(radial.size()); }
  int channels() const { return n_ang() * n_rad(); }
  int channel(int ia, int ir) const { return ia * n_rad() + ir; }
  double d_omega() const { return radial.size() > 1 ? radial[1] - radial[0] : 1.0; }
  int max_abs_angular() const;
  void validate() const;
  bool operator==(const FrequencyConfig&) const = default;
};

/// Uniform samples of angle over [0, 2pi) and of log-radius over [logrho_min, logrho_max].
/// A single log-radius sample stands for a delta in radius and carries quadrature weight 1.
struct PolarSampling {
  int n_phi = 36;
  int n_logrho = 8;
  double logrho_min = 0.0;
  double logrho_max = 1.0;

  int size() const { return n_phi * n_logrho; }
  int index(int j, int l) const { return j * n_logrho + l; }
  double phi(int j) const;
  double logrho(int l) const;
  double rho(int l) const;
  double d_phi() const;
  double d_logrho() const;
  /// Trapezoid weight in log-radius including d_logrho (1 for a single sample).
  double weight(int l) const;
  void validate() const;
  void require_nyquist(const FrequencyConfig& c) const;
  bool operator==(const PolarSampling&) const = default;
};

struct PolarPoint {
  double phi;
  double rho;
};

/// Field over (x, y) x (theta, r). data(iy * n + ix, sampling.index(j, l)).
struct OrientationScaleField {
  GridSpec spec;
  PolarSampling sampling;
  Eigen::MatrixXcd data;

  OrientationScaleField() = default;
  OrientationScaleField(const GridSpec& g, const PolarSampling& s)
      : spec(g), sampling(s), data(Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(g.n) * g.n, s.size())) {}
};

/// Spatial Fourier x AFMT coefficients. coeffs(ky * n + kx, channel) with ky = omega_y + n/2.
/// The (theta, r) basis is e^{i sign m theta} r^{sign (alpha + i omega)}; sign = -1 marks the
/// negated output frequencies of the special convolution.
struct JointSpectrum {
  GridSpec spec;
  FrequencyConfig config;
  double alpha = 0.0;
  int sign = 1;
  Eigen::MatrixXcd coeffs;
};

/// Four-index AFMT coefficients. coeffs(input channel (omega_phi, omega_rho), output channel (omega_theta, omega_r)).
struct FilterSpectrum {
  FrequencyConfig config;
  Eigen::MatrixXcd coeffs;
};

/// Samples over (phi, rho) x (theta, r). data(position.index(i, l), velocity.index(j, q)).
struct JointPolarField {
  PolarSampling position;
  PolarSampling velocity;
  Eigen::MatrixXcd data;

  JointPolarField() = default;
  JointPolarField(const PolarSampling& pos, const PolarSampling& vel)
      : position(pos), velocity(vel), data(Eigen::MatrixXcd::Zero(pos.size(), vel.size())) {}
};

// Spatial DFT, unitary, signed frequency layout.
SpectralGrid dft2_forward(const SpatialGrid& f);
SpatialGrid dft2_inverse(const SpectralGrid& F);
/// In-place transform of every column of an (n*n) x channels matrix.
void dft2_columns(Eigen::MatrixXcd& m, int n, bool inverse);

// AFMT on polar samples. f_polar(j, l) over (phi_j, logrho_l); coefficients (ia, ir).
Eigen::MatrixXcd afmt_forward(const Eigen::MatrixXcd& f_polar, const PolarSampling& s, const FrequencyConfig& c,
                              double alpha);
Eigen::VectorXcd afmt_inverse(const Eigen::MatrixXcd& coeffs, const FrequencyConfig& c, double alpha,
                              const std::vector<PolarPoint>& targets);
Eigen::MatrixXcd afmt_inverse_grid(const Eigen::MatrixXcd& coeffs, const FrequencyConfig& c, double alpha,
                                   const PolarSampling& s);

/// channels x samples; (A f)(c) is the AFMT coefficient of polar samples f.
Eigen::MatrixXcd afmt_analysis_matrix(const PolarSampling& s, const FrequencyConfig& c, double alpha);
/// samples x channels; includes the d_omega weight. sign = -1 gives the negated basis.
Eigen::MatrixXcd afmt_synthesis_matrix(const PolarSampling& s, const FrequencyConfig& c, double alpha, int sign = 1);

FilterSpectrum joint_afmt_forward(const JointPolarField& field, const FrequencyConfig& c);

/// 2D input times a delta at (phi = 0, rho = 1).
JointSpectrum lift_2d_input(const SpatialGrid& f, const FrequencyConfig& c);

/// Per-pixel AFMT followed by the spatial DFT.
JointSpectrum analyze_field(const OrientationScaleField& f, const FrequencyConfig& c, double alpha);
/// Inverse of analyze_field on the sampling grid.
OrientationScaleField synthesize_field(const JointSpectrum& s, const PolarSampling& sampling);

}  // namespace pw
