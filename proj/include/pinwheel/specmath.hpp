#pragma once

#include "pinwheel/grid.hpp"

namespace pw {

struct PoleError : std::domain_error {
  using std::domain_error::domain_error;
};

/// One basis index: angular frequency omega_phi and radial frequency s = alpha + i*omega_rho.
struct PinwheelFrequency {
  int omega_phi = 0;
  double alpha = -1.0;
  double omega_rho = 0.0;

  Complex s() const { return {alpha, omega_rho}; }
};

/// Gamma function (Lanczos, g = 607/128, 15 terms; reflection below Re z = 1/2).
Complex complex_gamma(Complex z);

/// A logarithm of Gamma. exp() of it is Gamma; the imaginary part is not reduced to the principal branch.
Complex complex_log_gamma(Complex z);

/// e^{i w_phi phi} rho^{alpha + i w_rho}.
Complex eval_pinwheel(double phi, double rho, const PinwheelFrequency& f);

/// Samples of the pinwheel on the grid; the origin sample is 0.
SpatialGrid sample_pinwheel(const GridSpec& g, const PinwheelFrequency& f);

/// The frequency-independent factor pi (-i)^{|m|} Gamma((2+|m|+s)/2) / Gamma((|m|-s)/2).
Complex pinwheel_gamma_factor(int m, Complex s);

/// Closed-form coefficient before the zero-sum correction; 0 at the origin.
Complex fourier_pinwheel_raw(int omega_x, int omega_y, const PinwheelFrequency& f, const GridSpec& g);

/// Constant that makes the corrected table sum to zero.
Complex compute_epsilon(const PinwheelFrequency& f, const GridSpec& g);

/// Corrected coefficient: closed form plus epsilon (epsilon alone at the origin).
Complex fourier_pinwheel_coeff(int omega_x, int omega_y, const PinwheelFrequency& f, const GridSpec& g);

/// Full corrected table over [-n/2, n/2-1]^2.
SpectralGrid fourier_pinwheel_table(const PinwheelFrequency& f, const GridSpec& g);

/// As fourier_pinwheel_table, but Nyquist entries average the closed form over the +-n/2 aliases and the
/// zero-sum constant is recomputed. Quarter turns of the grid map this table onto itself.
SpectralGrid symmetric_pinwheel_table(const PinwheelFrequency& f, const GridSpec& g);

/// Throws DomainError unless alpha lies in (-2, -0.5).
void require_pinwheel_alpha(double alpha);

}  // namespace pw
