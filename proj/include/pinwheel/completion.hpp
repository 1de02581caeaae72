#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pinwheel/simgroup.hpp"

namespace pw {

struct DivergenceError : std::runtime_error {
  DivergenceError(const std::string& what, int iteration) : std::runtime_error(what), iteration(iteration) {}
  int iteration;
};

/// Direction-Brownian particles: unit speed, heading increments N(0, T step), weight decay e^{-step/tau}.
struct RandomProcessParams {
  double T = 0.018;
  double tau = 9.0;
  double corner_weight = 0.0;
  std::int64_t n_particles = 100000;
  double step = 0.05;
  double max_length = 0.0;  // 0: 1.2 * P / 2
  std::uint64_t seed = 1;

  void validate() const;
};

struct BiasParams {
  double sigma_rho = 0.5;
  double sigma_r = 0.5;
  double gamma = 10.0;
  double sigma_theta = 0.3;  // width of the orientation preference where a point carries one

  void validate() const;
};

struct StimulusPoint {
  double x = 0.0;
  double y = 0.0;
  /// Arm direction; when set, orientations orthogonal to it are preferred.
  std::optional<double> arm_theta;
};

struct Stimulus {
  std::vector<StimulusPoint> points;
};

enum class StimulusKind { Circle, Koffka, Avocado, Points };

struct StimulusSpec {
  StimulusKind kind = StimulusKind::Circle;
  int n_dots = 8;              // circle
  double radius = 24.0;        // circle
  double cx = 0.0, cy = 0.0;   // circle / koffka / avocado centre
  double arm_distance = 20.0;  // koffka: distance from centre to the inner arm ends
  double arm_width = 8.0;      // koffka
  int contour_points = 20;     // avocado
  int noise_points = 20;       // avocado
  double size = 22.0;          // avocado: half height of the contour
  std::uint64_t noise_seed = 7;
  std::vector<StimulusPoint> points;  // kind = Points
};

/// Reflection about the line through the origin at `reflection_angle` (if set), then the similarity.
struct StimulusTransform {
  std::optional<double> reflection_angle;
  SimilarityParams similarity;
};

enum class Taper { None, Fejer };

struct ExperimentConfig {
  GridSpec grid{128, 128.0};
  FrequencyConfig freqs = FrequencyConfig::desk();
  Taper taper = Taper::Fejer;
  PolarSampling polar{36, 8, 0.0, 4.1588830833596715};            // (theta, r) samples of the field
  PolarSampling filter_position{64, 48, 0.0, 4.1588830833596715};  // position bins of the Green's function
  RandomProcessParams process;
  BiasParams bias;
  int iterations = 10;
  StimulusSpec stimulus;
  std::optional<StimulusTransform> transform;

  /// Desk defaults on an n x n grid with unit pixels.
  static ExperimentConfig desk(int n = 128);
  void validate() const;
};

/// Bin edges of the Green's function in log-radius: position.logrho(l) is the centre of bin l.
double greens_bin_lower(const PolarSampling& position, int l);

/// Monte Carlo transition density from the origin, heading 0, unit speed, integrated over arc length.
/// Position bins follow `position`; headings fall in velocity.n_phi bins at the single speed r = 1.
JointPolarField greens_function(const RandomProcessParams& p, const GridSpec& g, const PolarSampling& position,
                                int n_theta);

/// As greens_function with one uniform heading reset per particle at a uniform arc length.
JointPolarField corner_greens_function(const RandomProcessParams& p, const GridSpec& g, const PolarSampling& position,
                                       int n_theta);

/// Per-length statistics of the particle process without binning.
struct ParticleMoments {
  std::vector<double> lengths;
  std::vector<double> mass;              // mean weight
  std::vector<double> heading_mean;      // unwrapped heading
  std::vector<double> heading_variance;  // unwrapped heading
  std::vector<double> reset_heading_histogram;  // corner process only: bins over [0, 2pi)
};
ParticleMoments particle_moments(const RandomProcessParams& p, const std::vector<double>& lengths, bool corner = false,
                                 int reset_bins = 0);

/// Joint AFMT of a Green's function, with optional Fejer weights on all four frequency indices.
FilterSpectrum build_filter(const JointPolarField& greens, const FrequencyConfig& c, Taper taper = Taper::None);

/// Filter of the time-reversed process: g(-x, theta), i.e. a factor (-1)^{m-n}.
FilterSpectrum reverse_filter(const FilterSpectrum& f);

/// Bias of one point at relative polar position (phi, rho) and velocity (theta, r).
double eval_bias(const BiasParams& b, double phi, double rho, double theta, double r,
                 std::optional<double> arm_theta = std::nullopt);

OrientationScaleField bias_field(const Stimulus& s, const BiasParams& b, const GridSpec& g, const PolarSampling& polar);

Stimulus make_stimulus(const StimulusSpec& spec);
Stimulus transform_stimulus(const Stimulus& s, const StimulusTransform& t);
Eigen::Vector2d apply_transform(const Eigen::Vector2d& x, const StimulusTransform& t);
Eigen::Vector2d invert_transform(const Eigen::Vector2d& x, const StimulusTransform& t);

/// Dense polyline of the avocado outline used by make_stimulus (closed; first point not repeated).
std::vector<Eigen::Vector2d> avocado_outline(const StimulusSpec& spec, int samples);

struct PowerResult {
  OrientationScaleField forward;   // last propagated field before the bias
  OrientationScaleField backward;
  std::vector<double> forward_norms;
  std::vector<double> backward_norms;
};

/// f <- normalize(bias * synthesize(conv(analyze(f)))) starting from the normalized bias.
PowerResult power_iteration(const FilterSpectrum& filter, const OrientationScaleField& bias, const FrequencyConfig& c,
                            int iterations);

/// Re sum_{theta, r} P Q, clamped at 0.
SpatialGrid completion_field(const OrientationScaleField& forward, const OrientationScaleField& backward);

struct ExperimentResult {
  Stimulus stimulus;
  OrientationScaleField bias;
  PowerResult power;
  SpatialGrid field;
};

/// Green's function and filter for a config.
FilterSpectrum experiment_filter(const ExperimentConfig& cfg);
/// Full run with a prebuilt filter.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const FilterSpectrum& filter);

}  // namespace pw
