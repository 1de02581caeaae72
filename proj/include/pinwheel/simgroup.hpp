#pragma once

#include <array>
#include <functional>
#include <vector>

#include "pinwheel/transforms.hpp"

namespace pw {

/// Translation (dx, dy), rotation dtheta, dilation a. Rotation and dilation act before translation.
struct SimilarityParams {
  double dx = 0.0;
  double dy = 0.0;
  double dtheta = 0.0;
  double a = 1.0;

  void validate() const;
};

/// Precomputed form of the joint convolution for one grid and filter.
///
/// For k != 0 the Fourier pinwheel factors as
///   H'(k; m-n, s) = c(m-n, s) A_k e^{i m phibar_k + i omega L_k} e^{-i n phibar_k - i omega_r L_k}
/// with L_k = log(P / (pi |k|)) and A_k = e^{(2 + alpha_rho - alpha_r) L_k}, so the sum over
/// input channels becomes two dense products with k-independent matrices. Rows on the -n/2 edges
/// average the pinwheel over the +-n/2 aliases and are handled one alias at a time.
class JointConvPlan {
 public:
  JointConvPlan(const GridSpec& g, const FilterSpectrum& filter);

  /// Output envelope alpha_r; includes the 4 pi^2 and d_omega weights.
  JointSpectrum apply(const JointSpectrum& in) const;

  /// Same for the input spatial(kx, ky) * channel(c) with input envelope alpha_rho. spatial is evaluated at
  /// every alias of the edge frequencies, so it may distinguish +n/2 from -n/2.
  JointSpectrum apply_separable(const Eigen::VectorXcd& channel, const std::function<Complex(int, int)>& spatial) const;

  const GridSpec& grid() const { return grid_; }
  const FrequencyConfig& config() const { return config_; }

 private:
  struct AliasRow {
    Eigen::Index k;
    std::vector<std::array<int, 2>> freqs;
  };

  Eigen::MatrixXcd main_product(const Eigen::MatrixXcd& in) const;
  Eigen::RowVectorXcd alias_row(const AliasRow& row,
                                const std::function<Eigen::RowVectorXcd(int, int)>& input) const;
  JointSpectrum make_output(Eigen::MatrixXcd coeffs) const;

  GridSpec grid_;
  FrequencyConfig config_;
  std::vector<AliasRow> alias_rows_;
  Eigen::VectorXd amp_;      // A_k, 0 at k = 0
  Eigen::MatrixXcd phase_;   // e^{i (m phibar_k + omega L_k)} per channel
  Eigen::MatrixXcd g_main_;  // filter times Gamma factor
  Eigen::MatrixXcd g_eps_;   // filter times epsilon
};

/// Samples of g' rotated, dilated, then translated; Gc(ia, ir) are AFMT coefficients of g' with envelope alpha.
SpatialGrid similarity_transform_2d(const Eigen::MatrixXcd& Gc, double alpha, const SimilarityParams& p,
                                    const FrequencyConfig& c, const GridSpec& g);

/// F = dft2_forward(f'). Output channel (m, omega) holds output frequency (-m, -(alpha + i omega)).
JointSpectrum group_conv_special(const SpectralGrid& F, const Eigen::MatrixXcd& Gc, double alpha,
                                 const FrequencyConfig& c, const GridSpec& g);

/// Samples on the grid and velocity sampling of the transformed joint filter.
OrientationScaleField similarity_transform_joint(const FilterSpectrum& Gf, const SimilarityParams& p,
                                                 const GridSpec& g, const PolarSampling& velocity);

JointSpectrum group_conv_joint(const JointSpectrum& Fj, const FilterSpectrum& Gf);

/// Multiplies the synthesized output by the bias and re-analyzes with the input envelope alpha_rho.
JointSpectrum envelope_fix(const JointSpectrum& O, const OrientationScaleField& bias);

/// Continuous transform of a joint field: f(R^{-1}(x - dx)/a, theta - dtheta, r/a).
/// Spatial values come from trigonometric interpolation of the periodic samples.
JointSpectrum transform_joint_spectrum(const JointSpectrum& s, const SimilarityParams& p);

/// Same transform evaluated at arbitrary spatial points; rows follow `points`, columns are channels.
Eigen::MatrixXcd transform_joint_samples(const JointSpectrum& s, const SimilarityParams& p,
                                         const std::vector<Eigen::Vector2d>& points);

}  // namespace pw
