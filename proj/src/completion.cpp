#include "pinwheel/completion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "pinwheel/parallel.hpp"

namespace pw {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Particles are split into this many independently seeded blocks; results are summed in block order,
// so they do not depend on the thread count.
constexpr int kBlocks = 64;
constexpr double kBiasFloor = 1e-200;

double wrap_angle(double a) { return std::remainder(a, kTwoPi); }

std::mt19937_64 block_rng(std::uint64_t seed, int block) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(block), 0x5eedu};
  return std::mt19937_64(seq);
}

std::int64_t block_count(std::int64_t total, int block) {
  return total * (block + 1) / kBlocks - total * block / kBlocks;
}

double max_length(const RandomProcessParams& p, const GridSpec& g) {
  return p.max_length > 0.0 ? p.max_length : 0.6 * g.p;
}

JointPolarField run_greens(const RandomProcessParams& p, const GridSpec& g, const PolarSampling& position,
                           int n_theta, bool corner) {
  p.validate();
  g.validate();
  position.validate();
  if (n_theta < 1) throw DomainError("n_theta must be positive");
  const double L = max_length(p, g);
  const auto steps = static_cast<std::int64_t>(std::floor(L / p.step));
  const double h = p.step;
  const double sd = std::sqrt(p.T * h);
  const double dphi = kTwoPi / position.n_phi, dth = kTwoPi / n_theta;
  const double du = position.d_logrho();
  const double u0 = greens_bin_lower(position, 0);
  const int nphi = position.n_phi, nlr = position.n_logrho;

  std::vector<Eigen::MatrixXd> hist(kBlocks);
  parallel_for(kBlocks, [&](std::size_t b0, std::size_t b1) {
    for (std::size_t blk = b0; blk < b1; ++blk) {
      auto rng = block_rng(p.seed ^ (corner ? 0xC0A7E7ull : 0ull), static_cast<int>(blk));
      std::normal_distribution<double> normal(0.0, 1.0);
      std::uniform_real_distribution<double> uni(0.0, 1.0);
      Eigen::MatrixXd H = Eigen::MatrixXd::Zero(position.size(), n_theta);
      const std::int64_t count = block_count(p.n_particles, static_cast<int>(blk));
      for (std::int64_t q = 0; q < count; ++q) {
        double x = 0.0, y = 0.0, th = 0.0;
        std::int64_t reset_step = -1;
        double reset_heading = 0.0;
        if (corner) {
          reset_step = static_cast<std::int64_t>(std::floor(uni(rng) * L / h));
          reset_heading = kTwoPi * uni(rng);
        }
        for (std::int64_t t = 0; t < steps; ++t) {
          if (t == reset_step) th = reset_heading;
          const double c = std::cos(th), s = std::sin(th);
          const double xm = x + 0.5 * h * c, ym = y + 0.5 * h * s;
          x += h * c;
          y += h * s;
          const double rho = std::hypot(xm, ym);
          if (rho > 0.0) {
            const double fl = (std::log(rho) - u0) / du;
            if (fl >= 0.0 && fl < nlr) {
              const int l = static_cast<int>(fl);
              double a = std::atan2(ym, xm);
              if (a < 0) a += kTwoPi;
              const int ip = static_cast<int>(std::floor(a / dphi + 0.5)) % nphi;
              double hb = std::fmod(th, kTwoPi);
              if (hb < 0) hb += kTwoPi;
              const int it = static_cast<int>(std::floor(hb / dth + 0.5)) % n_theta;
              H(position.index(ip, l), it) += std::exp(-(t + 0.5) * h / p.tau);
            }
          }
          th += sd * normal(rng);
        }
      }
      hist[blk] = std::move(H);
    }
  });
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(position.size(), n_theta);
  for (const auto& H : hist) total += H;
  total *= h / static_cast<double>(p.n_particles);

  PolarSampling vel{n_theta, 1, 0.0, 0.0};
  JointPolarField out(position, vel);
  // Bin masses become densities in (x, y, theta) whose quadrature with the sampling weights returns the mass.
  for (int i = 0; i < nphi; ++i)
    for (int l = 0; l < nlr; ++l) {
      const double rho = position.rho(l);
      const double w = rho * rho * dphi * position.weight(l) * dth;
      for (int j = 0; j < n_theta; ++j) out.data(position.index(i, l), j) = total(position.index(i, l), j) / w;
    }
  return out;
}

}  // namespace

void RandomProcessParams::validate() const {
  if (!(T >= 0.0) || !(tau > 0.0) || !(step > 0.0) || !(corner_weight >= 0.0) || n_particles < 1 ||
      !(max_length >= 0.0))
    throw DomainError("invalid random process parameters");
}

void BiasParams::validate() const {
  if (!(sigma_rho > 0.0) || !(sigma_r > 0.0) || !(sigma_theta > 0.0) || !std::isfinite(gamma))
    throw DomainError("bias widths must be positive");
}

ExperimentConfig ExperimentConfig::desk(int n) {
  ExperimentConfig c;
  c.grid = {n, static_cast<double>(n)};
  const double top = std::log(n / 2.0);
  c.polar = {36, 8, 0.0, top};
  const int nlr = 48;
  const double d = top / nlr;
  c.filter_position = {64, nlr, 0.5 * d, top - 0.5 * d};
  return c;
}

void ExperimentConfig::validate() const {
  grid.validate();
  freqs.validate();
  polar.validate();
  polar.require_nyquist(freqs);
  filter_position.validate();
  filter_position.require_nyquist(freqs);
  process.validate();
  bias.validate();
  if (iterations < 0) throw DomainError("iterations must be non-negative");
}

double greens_bin_lower(const PolarSampling& position, int l) {
  return position.logrho(l) - 0.5 * position.d_logrho();
}

JointPolarField greens_function(const RandomProcessParams& p, const GridSpec& g, const PolarSampling& position,
                                int n_theta) {
  return run_greens(p, g, position, n_theta, false);
}

JointPolarField corner_greens_function(const RandomProcessParams& p, const GridSpec& g, const PolarSampling& position,
                                       int n_theta) {
  return run_greens(p, g, position, n_theta, true);
}

ParticleMoments particle_moments(const RandomProcessParams& p, const std::vector<double>& lengths, bool corner,
                                 int reset_bins) {
  p.validate();
  ParticleMoments out;
  out.lengths = lengths;
  const std::size_t nL = lengths.size();
  const double h = p.step, sd = std::sqrt(p.T * h);
  const double Lmax = nL ? *std::max_element(lengths.begin(), lengths.end()) : 0.0;
  std::vector<std::int64_t> at(nL);
  for (std::size_t i = 0; i < nL; ++i) at[i] = static_cast<std::int64_t>(std::llround(lengths[i] / h));
  const std::int64_t steps = nL ? *std::max_element(at.begin(), at.end()) : 0;

  struct Acc {
    std::vector<double> w, s1, s2;
    std::vector<double> hist;
  };
  std::vector<Acc> acc(kBlocks);
  parallel_for(kBlocks, [&](std::size_t b0, std::size_t b1) {
    for (std::size_t blk = b0; blk < b1; ++blk) {
      auto rng = block_rng(p.seed ^ (corner ? 0xC0A7E7ull : 0ull), static_cast<int>(blk));
      std::normal_distribution<double> normal(0.0, 1.0);
      std::uniform_real_distribution<double> uni(0.0, 1.0);
      Acc a{std::vector<double>(nL), std::vector<double>(nL), std::vector<double>(nL),
            std::vector<double>(static_cast<std::size_t>(std::max(reset_bins, 0)))};
      const std::int64_t count = block_count(p.n_particles, static_cast<int>(blk));
      for (std::int64_t q = 0; q < count; ++q) {
        double th = 0.0, w = 1.0;
        std::int64_t reset_step = -1;
        double reset_heading = 0.0;
        if (corner) {
          reset_step = static_cast<std::int64_t>(std::floor(uni(rng) * Lmax / h));
          reset_heading = kTwoPi * uni(rng);
          if (reset_bins > 0)
            a.hist[static_cast<std::size_t>(std::min<int>(reset_bins - 1, static_cast<int>(reset_heading / kTwoPi * reset_bins)))] += 1.0;
        }
        for (std::int64_t t = 0; t <= steps; ++t) {
          for (std::size_t i = 0; i < nL; ++i)
            if (at[i] == t) {
              a.w[i] += w;
              a.s1[i] += th;
              a.s2[i] += th * th;
            }
          if (t == reset_step) th = reset_heading;
          th += sd * normal(rng);
          w *= std::exp(-h / p.tau);
        }
      }
      acc[blk] = std::move(a);
    }
  });
  const double N = static_cast<double>(p.n_particles);
  out.mass.assign(nL, 0.0);
  out.heading_mean.assign(nL, 0.0);
  out.heading_variance.assign(nL, 0.0);
  out.reset_heading_histogram.assign(static_cast<std::size_t>(std::max(reset_bins, 0)), 0.0);
  std::vector<double> s1(nL, 0.0), s2(nL, 0.0);
  for (const auto& a : acc) {
    for (std::size_t i = 0; i < nL; ++i) {
      out.mass[i] += a.w[i];
      s1[i] += a.s1[i];
      s2[i] += a.s2[i];
    }
    for (std::size_t b = 0; b < a.hist.size(); ++b) out.reset_heading_histogram[b] += a.hist[b];
  }
  for (std::size_t i = 0; i < nL; ++i) {
    out.mass[i] /= N;
    out.heading_mean[i] = s1[i] / N;
    out.heading_variance[i] = (s2[i] - s1[i] * s1[i] / N) / (N - 1.0);
  }
  return out;
}

FilterSpectrum build_filter(const JointPolarField& greens, const FrequencyConfig& c, Taper taper) {
  FilterSpectrum f = joint_afmt_forward(greens, c);
  if (taper == Taper::Fejer) {
    // Triangular weights on both angular and both radial indices.
    const double K = c.max_abs_angular();
    const double Wm = std::max(std::abs(c.radial.front()), std::abs(c.radial.back()));
    for (int ia = 0; ia < c.n_ang(); ++ia)
      for (int ir = 0; ir < c.n_rad(); ++ir) {
        const double wi = std::max(0.0, 1.0 - std::abs(c.angular[ia]) / K) * std::max(0.0, 1.0 - std::abs(c.radial[ir]) / Wm);
        for (int oa = 0; oa < c.n_ang(); ++oa)
          for (int orr = 0; orr < c.n_rad(); ++orr) {
            const double wo = std::max(0.0, 1.0 - std::abs(c.angular[oa]) / K) * std::max(0.0, 1.0 - std::abs(c.radial[orr]) / Wm);
            f.coeffs(c.channel(ia, ir), c.channel(oa, orr)) *= wi * wo;
          }
      }
  }
  return f;
}

FilterSpectrum reverse_filter(const FilterSpectrum& f) {
  FilterSpectrum out = f;
  const FrequencyConfig& c = f.config;
  for (int ia = 0; ia < c.n_ang(); ++ia)
    for (int oa = 0; oa < c.n_ang(); ++oa) {
      if (((c.angular[ia] - c.angular[oa]) & 1) == 0) continue;
      for (int ir = 0; ir < c.n_rad(); ++ir)
        for (int orr = 0; orr < c.n_rad(); ++orr) out.coeffs(c.channel(ia, ir), c.channel(oa, orr)) *= -1.0;
    }
  return out;
}

// ---------------------------------------------------------------- bias and stimuli

namespace {

double orientation_factor(double theta, double arm, double sigma) {
  const double d1 = wrap_angle(theta - (arm + 0.5 * kPi));
  const double d2 = wrap_angle(theta - (arm - 0.5 * kPi));
  return std::exp(-d1 * d1 / (2 * sigma * sigma)) + std::exp(-d2 * d2 / (2 * sigma * sigma));
}

}  // namespace

double eval_bias(const BiasParams& b, double phi, double rho, double theta, double r, std::optional<double> arm_theta) {
  (void)phi;
  if (!(rho > 0.0) || !(r > 0.0)) throw DomainError("eval_bias: rho and r must be positive");
  const double lr = std::log(r) - std::log(rho);
  double v = std::exp(-rho * rho / (2 * b.sigma_rho * b.sigma_rho) + b.gamma * std::log(rho) -
                      lr * lr / (2 * b.sigma_r * b.sigma_r));
  if (arm_theta) v *= orientation_factor(theta, *arm_theta, b.sigma_theta);
  return v;
}

OrientationScaleField bias_field(const Stimulus& s, const BiasParams& b, const GridSpec& g, const PolarSampling& polar) {
  b.validate();
  g.validate();
  polar.validate();
  OrientationScaleField out(g, polar);
  const int nt = polar.n_phi, nr = polar.n_logrho;
  std::vector<std::vector<double>> orient;
  for (const auto& p : s.points) {
    std::vector<double> o(static_cast<std::size_t>(nt), 1.0);
    if (p.arm_theta)
      for (int j = 0; j < nt; ++j) o[static_cast<std::size_t>(j)] = orientation_factor(polar.phi(j), *p.arm_theta, b.sigma_theta);
    orient.push_back(std::move(o));
  }
  parallel_for(static_cast<std::size_t>(g.n) * g.n, [&](std::size_t b0, std::size_t b1) {
    std::vector<double> sc(static_cast<std::size_t>(nr));
    for (std::size_t px = b0; px < b1; ++px) {
      const int iy = static_cast<int>(px) / g.n, ix = static_cast<int>(px) % g.n;
      const double x = g.coord(ix), y = g.coord(iy);
      for (std::size_t q = 0; q < s.points.size(); ++q) {
        const double rho = std::hypot(x - s.points[q].x, y - s.points[q].y);
        if (!(rho > 0.0)) continue;
        const double lrho = std::log(rho);
        const double sp = std::exp(-rho * rho / (2 * b.sigma_rho * b.sigma_rho) + b.gamma * lrho);
        if (sp < kBiasFloor) continue;
        for (int l = 0; l < nr; ++l) {
          const double d = polar.logrho(l) - lrho;
          const double v = sp * std::exp(-d * d / (2 * b.sigma_r * b.sigma_r));
          // Tails this small only produce subnormal arithmetic downstream.
          sc[static_cast<std::size_t>(l)] = v < kBiasFloor ? 0.0 : v;
        }
        for (int j = 0; j < nt; ++j)
          for (int l = 0; l < nr; ++l)
            out.data(static_cast<Eigen::Index>(px), polar.index(j, l)) += sc[static_cast<std::size_t>(l)] * orient[q][static_cast<std::size_t>(j)];
      }
    }
  });
  return out;
}

std::vector<Eigen::Vector2d> avocado_outline(const StimulusSpec& spec, int samples) {
  // Pear-like outline: narrower towards +y.
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    const double t = kTwoPi * i / samples;
    const double half_width = 0.62 * spec.size * (1.0 - 0.28 * std::sin(t));
    pts.emplace_back(spec.cx + half_width * std::cos(t), spec.cy + spec.size * std::sin(t));
  }
  return pts;
}

Stimulus make_stimulus(const StimulusSpec& spec) {
  Stimulus s;
  switch (spec.kind) {
    case StimulusKind::Circle:
      if (spec.n_dots < 1 || !(spec.radius > 0.0)) throw DomainError("circle needs dots and a positive radius");
      for (int i = 0; i < spec.n_dots; ++i) {
        const double a = kTwoPi * i / spec.n_dots;
        s.points.push_back({spec.cx + spec.radius * std::cos(a), spec.cy + spec.radius * std::sin(a), std::nullopt});
      }
      break;
    case StimulusKind::Koffka: {
      // Inner ends of four arms along the axes; each end contributes its two corners.
      const double d = spec.arm_distance, hw = 0.5 * spec.arm_width;
      if (!(d > 0.0) || !(hw > 0.0)) throw DomainError("koffka needs positive arm distance and width");
      for (int k = 0; k < 4; ++k) {
        const double a = 0.5 * kPi * k;
        const double ca = std::cos(a), sa = std::sin(a);
        for (int sgn : {-1, 1}) {
          const double px = d * ca - sgn * hw * sa, py = d * sa + sgn * hw * ca;
          s.points.push_back({spec.cx + px, spec.cy + py, a});
        }
      }
      break;
    }
    case StimulusKind::Avocado: {
      if (spec.contour_points < 1 || spec.noise_points < 0) throw DomainError("avocado point counts invalid");
      const auto dense = avocado_outline(spec, 4096);
      std::vector<double> arc(dense.size() + 1, 0.0);
      for (std::size_t i = 0; i < dense.size(); ++i) arc[i + 1] = arc[i] + (dense[(i + 1) % dense.size()] - dense[i]).norm();
      for (int k = 0; k < spec.contour_points; ++k) {
        const double target = arc.back() * k / spec.contour_points;
        const auto it = std::upper_bound(arc.begin(), arc.end(), target);
        const std::size_t i = static_cast<std::size_t>(std::distance(arc.begin(), it)) - 1;
        const double f = (target - arc[i]) / (arc[i + 1] - arc[i]);
        const Eigen::Vector2d p = dense[i] + f * (dense[(i + 1) % dense.size()] - dense[i]);
        s.points.push_back({p.x(), p.y(), std::nullopt});
      }
      std::mt19937_64 rng(spec.noise_seed);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      const double extent = 1.5 * spec.size;
      for (int k = 0; k < spec.noise_points; ++k) {
        const double x = spec.cx + extent * u(rng);
        const double y = spec.cy + extent * u(rng);
        s.points.push_back({x, y, std::nullopt});
      }
      break;
    }
    case StimulusKind::Points:
      s.points = spec.points;
      break;
  }
  return s;
}

Eigen::Vector2d apply_transform(const Eigen::Vector2d& x, const StimulusTransform& t) {
  Eigen::Vector2d p = x;
  if (t.reflection_angle) {
    const double c = std::cos(2 * *t.reflection_angle), s = std::sin(2 * *t.reflection_angle);
    p = Eigen::Vector2d(c * x.x() + s * x.y(), s * x.x() - c * x.y());
  }
  const auto& q = t.similarity;
  const double c = std::cos(q.dtheta), s = std::sin(q.dtheta);
  return Eigen::Vector2d(q.a * (c * p.x() - s * p.y()) + q.dx, q.a * (s * p.x() + c * p.y()) + q.dy);
}

Eigen::Vector2d invert_transform(const Eigen::Vector2d& x, const StimulusTransform& t) {
  const auto& q = t.similarity;
  const double c = std::cos(q.dtheta), s = std::sin(q.dtheta);
  const double ux = (x.x() - q.dx) / q.a, uy = (x.y() - q.dy) / q.a;
  Eigen::Vector2d p(c * ux + s * uy, -s * ux + c * uy);
  if (t.reflection_angle) {
    const double c2 = std::cos(2 * *t.reflection_angle), s2 = std::sin(2 * *t.reflection_angle);
    p = Eigen::Vector2d(c2 * p.x() + s2 * p.y(), s2 * p.x() - c2 * p.y());
  }
  return p;
}

Stimulus transform_stimulus(const Stimulus& s, const StimulusTransform& t) {
  t.similarity.validate();
  Stimulus out;
  for (const auto& p : s.points) {
    const Eigen::Vector2d q = apply_transform({p.x, p.y}, t);
    StimulusPoint r{q.x(), q.y(), std::nullopt};
    if (p.arm_theta) {
      double a = *p.arm_theta;
      if (t.reflection_angle) a = 2 * *t.reflection_angle - a;
      r.arm_theta = a + t.similarity.dtheta;
    }
    out.points.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------- iteration

PowerResult power_iteration(const FilterSpectrum& filter, const OrientationScaleField& bias, const FrequencyConfig& c,
                            int iterations) {
  if (iterations < 0) throw DomainError("iterations must be non-negative");
  if (!(filter.config == c)) throw ShapeMismatch("power_iteration: filter config differs");
  const double b0 = bias.data.norm();
  if (!(b0 > 0.0) || !std::isfinite(b0)) throw DivergenceError("bias has zero or non-finite norm", 0);

  PowerResult res;
  auto run = [&](const FilterSpectrum& f, OrientationScaleField& last, std::vector<double>& norms) {
    OrientationScaleField field = bias;
    field.data /= b0;
    last = field;
    if (iterations == 0) return;
    JointConvPlan plan(bias.spec, f);
    for (int it = 0; it < iterations; ++it) {
      OrientationScaleField p = synthesize_field(plan.apply(analyze_field(field, c, c.alpha_rho)), bias.sampling);
      field.data = p.data.cwiseProduct(bias.data);
      const double lam = field.data.norm();
      if (!(lam > 1e-300) || !std::isfinite(lam))
        throw DivergenceError("field norm left the representable range at iteration " + std::to_string(it + 1), it + 1);
      field.data /= lam;
      norms.push_back(lam);
      last = std::move(p);
    }
  };
  run(filter, res.forward, res.forward_norms);
  run(reverse_filter(filter), res.backward, res.backward_norms);
  return res;
}

SpatialGrid completion_field(const OrientationScaleField& forward, const OrientationScaleField& backward) {
  if (!(forward.spec == backward.spec) || !(forward.sampling == backward.sampling) ||
      forward.data.rows() != backward.data.rows() || forward.data.cols() != backward.data.cols())
    throw ShapeMismatch("completion_field: fields differ in shape");
  const int n = forward.spec.n;
  SpatialGrid out(forward.spec);
  const Eigen::VectorXd v = forward.data.cwiseProduct(backward.data).rowwise().sum().real();
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) out.data(iy, ix) = std::max(0.0, v(static_cast<Eigen::Index>(iy) * n + ix));
  return out;
}

FilterSpectrum experiment_filter(const ExperimentConfig& cfg) {
  cfg.validate();
  JointPolarField G = greens_function(cfg.process, cfg.grid, cfg.filter_position, cfg.polar.n_phi);
  if (cfg.process.corner_weight > 0.0) {
    const JointPolarField Gc = corner_greens_function(cfg.process, cfg.grid, cfg.filter_position, cfg.polar.n_phi);
    G.data += cfg.process.corner_weight * Gc.data;
  }
  return build_filter(G, cfg.freqs, cfg.taper);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const FilterSpectrum& filter) {
  cfg.validate();
  ExperimentResult r;
  r.stimulus = make_stimulus(cfg.stimulus);
  if (cfg.transform) r.stimulus = transform_stimulus(r.stimulus, *cfg.transform);
  r.bias = bias_field(r.stimulus, cfg.bias, cfg.grid, cfg.polar);
  r.power = power_iteration(filter, r.bias, cfg.freqs, cfg.iterations);
  r.field = completion_field(r.power.forward, r.power.backward);
  return r;
}

}  // namespace pw
