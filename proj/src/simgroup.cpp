#include "pinwheel/simgroup.hpp"

#include <cmath>
#include <numbers>

#include "pinwheel/parallel.hpp"
#include "pinwheel/specmath.hpp"

namespace pw {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_spectrum(const JointSpectrum& s, const char* what) {
  s.spec.validate();
  s.config.validate();
  if (s.coeffs.rows() != static_cast<Eigen::Index>(s.spec.n) * s.spec.n || s.coeffs.cols() != s.config.channels())
    throw ShapeMismatch(std::string(what) + ": coefficients do not match grid and config");
}

// Velocity-part factor of f(theta - dtheta, r / a) for the basis e^{i sign m theta} r^{sign (alpha + i omega)}.
Eigen::VectorXcd velocity_factor(const FrequencyConfig& c, double alpha, int sign, const SimilarityParams& p) {
  Eigen::VectorXcd v(c.channels());
  const double la = std::log(p.a);
  for (int ia = 0; ia < c.n_ang(); ++ia)
    for (int ir = 0; ir < c.n_rad(); ++ir)
      v(c.channel(ia, ir)) = std::exp(Complex(-sign * alpha * la, -sign * (c.angular[ia] * p.dtheta + c.radial[ir] * la)));
  return v;
}

Complex translation_phase(const GridSpec& g, int kx, int ky, double dx, double dy) {
  return std::polar(1.0, -kTwoPi * (kx * dx + ky * dy) / g.p);
}

}  // namespace

void SimilarityParams::validate() const {
  if (!std::isfinite(dx) || !std::isfinite(dy) || !std::isfinite(dtheta) || !std::isfinite(a))
    throw DomainError("similarity parameters must be finite");
  if (!(a > 0.0)) throw DomainError("dilation must be positive");
}

// ---------------------------------------------------------------- joint convolution

JointConvPlan::JointConvPlan(const GridSpec& g, const FilterSpectrum& filter) : grid_(g), config_(filter.config) {
  g.validate();
  const FrequencyConfig& c = config_;
  c.validate();
  const int C = c.channels();
  if (filter.coeffs.rows() != C || filter.coeffs.cols() != C)
    throw ShapeMismatch("filter spectrum does not match its frequency config");
  require_finite(filter.coeffs, "filter spectrum");
  const double da = c.alpha_rho - c.alpha_r;
  require_pinwheel_alpha(da);

  const int n = g.n;
  const Eigen::Index K = static_cast<Eigen::Index>(n) * n;
  const int M = c.n_ang(), W = c.n_rad();
  const double dw = c.d_omega();

  amp_ = Eigen::VectorXd::Zero(K);
  phase_.resize(K, C);
  Eigen::VectorXd L = Eigen::VectorXd::Zero(K), phib = Eigen::VectorXd::Zero(K);
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const Eigen::Index k = static_cast<Eigen::Index>(iy) * n + ix;
      const int kx = g.freq(ix), ky = g.freq(iy);
      if (kx == 0 && ky == 0) continue;
      L(k) = std::log(g.p / (kPi * std::hypot(kx, ky)));
      phib(k) = std::atan2(ky, kx);
      amp_(k) = std::exp((2.0 + da) * L(k));
      if (2 * kx == -n || 2 * ky == -n) {
        AliasRow row{k, {}};
        alias_average(g, kx, ky, [&](int ax, int ay) {
          row.freqs.push_back({ax, ay});
          return Complex(0.0);
        });
        alias_rows_.push_back(std::move(row));
      }
    }
  }
  parallel_for(static_cast<std::size_t>(K), [&](std::size_t b, std::size_t e) {
    for (std::size_t kk = b; kk < e; ++kk) {
      const auto k = static_cast<Eigen::Index>(kk);
      for (int ia = 0; ia < M; ++ia)
        for (int ir = 0; ir < W; ++ir)
          phase_(k, c.channel(ia, ir)) = std::polar(1.0, c.angular[ia] * phib(k) + c.radial[ir] * L(k));
    }
  });

  // Differences: dm = m - n in [-(M-1), M-1], domega = (i - j) dw.
  const int DM = 2 * M - 1, DW = 2 * W - 1;
  Eigen::MatrixXcd Pm(K, DM), PL(K, DW);
  for (Eigen::Index k = 0; k < K; ++k) {
    for (int d = 0; d < DM; ++d) Pm(k, d) = amp_(k) * std::polar(1.0, (d - (M - 1)) * phib(k));
    for (int d = 0; d < DW; ++d) PL(k, d) = std::polar(1.0, (d - (W - 1)) * dw * L(k));
  }
  for (const AliasRow& row : alias_rows_) {
    for (int d = 0; d < DM; ++d) {
      Complex acc = 0.0;
      for (const auto& f : row.freqs) acc += std::polar(1.0, (d - (M - 1)) * std::atan2(f[1], f[0]));
      Pm(row.k, d) = amp_(row.k) * acc / static_cast<double>(row.freqs.size());
    }
  }
  const Eigen::MatrixXcd S = Pm.transpose() * PL;  // sum over k != 0 of the unit-factor coefficient
  Eigen::MatrixXcd fac(DM, DW), eps(DM, DW);
  const double inv_n2 = 1.0 / static_cast<double>(K);
  for (int a = 0; a < DM; ++a)
    for (int b = 0; b < DW; ++b) {
      fac(a, b) = pinwheel_gamma_factor(a - (M - 1), Complex(da, (b - (W - 1)) * dw));
      eps(a, b) = -fac(a, b) * S(a, b) * inv_n2;
    }

  const double w = 4.0 * kPi * kPi * dw;
  g_main_.resize(C, C);
  g_eps_.resize(C, C);
  for (int ia = 0; ia < M; ++ia)
    for (int ir = 0; ir < W; ++ir)
      for (int oa = 0; oa < M; ++oa)
        for (int orr = 0; orr < W; ++orr) {
          const int i = c.channel(ia, ir), o = c.channel(oa, orr);
          const int a = ia - oa + (M - 1), b = ir - orr + (W - 1);
          const Complex gv = filter.coeffs(i, o) * w;
          g_main_(i, o) = gv * fac(a, b);
          g_eps_(i, o) = gv * eps(a, b);
        }
}

Eigen::MatrixXcd JointConvPlan::main_product(const Eigen::MatrixXcd& in) const {
  Eigen::MatrixXcd out = phase_.cwiseProduct(in) * g_main_;
  out = out.cwiseProduct(phase_.conjugate());
  out.array().colwise() *= amp_.cast<Complex>().array();
  out.noalias() += in * g_eps_;
  return out;
}

Eigen::RowVectorXcd JointConvPlan::alias_row(const AliasRow& row,
                                             const std::function<Eigen::RowVectorXcd(int, int)>& input) const {
  const FrequencyConfig& c = config_;
  const double L = std::log(grid_.p / (kPi * std::hypot(row.freqs[0][0], row.freqs[0][1])));
  Eigen::RowVectorXcd acc = Eigen::RowVectorXcd::Zero(c.channels()), ph(c.channels());
  for (const auto& f : row.freqs) {
    const double pb = std::atan2(f[1], f[0]);
    for (int ia = 0; ia < c.n_ang(); ++ia)
      for (int ir = 0; ir < c.n_rad(); ++ir)
        ph(c.channel(ia, ir)) = std::polar(1.0, c.angular[ia] * pb + c.radial[ir] * L);
    const Eigen::RowVectorXcd x = input(f[0], f[1]);
    acc += amp_(row.k) * (ph.cwiseProduct(x) * g_main_).cwiseProduct(ph.conjugate()) + x * g_eps_;
  }
  return acc / static_cast<double>(row.freqs.size());
}

JointSpectrum JointConvPlan::make_output(Eigen::MatrixXcd coeffs) const {
  JointSpectrum out;
  out.spec = grid_;
  out.config = config_;
  out.alpha = config_.alpha_r;
  out.coeffs = std::move(coeffs);
  return out;
}

JointSpectrum JointConvPlan::apply(const JointSpectrum& in) const {
  check_spectrum(in, "group_conv_joint");
  if (!(in.spec == grid_)) throw ShapeMismatch("group_conv_joint: grid mismatch");
  if (!(in.config.angular == config_.angular) || !(in.config.radial == config_.radial))
    throw ShapeMismatch("group_conv_joint: frequency sets differ");
  if (in.sign != 1) throw ShapeMismatch("group_conv_joint: input must use the positive basis");
  JointSpectrum out = make_output(main_product(in.coeffs));
  for (const AliasRow& row : alias_rows_)
    out.coeffs.row(row.k) = alias_row(row, [&](int, int) { return Eigen::RowVectorXcd(in.coeffs.row(row.k)); });
  return out;
}

JointSpectrum JointConvPlan::apply_separable(const Eigen::VectorXcd& channel,
                                             const std::function<Complex(int, int)>& spatial) const {
  if (channel.size() != config_.channels()) throw ShapeMismatch("apply_separable: channel weights do not match config");
  const int n = grid_.n;
  Eigen::MatrixXcd in(static_cast<Eigen::Index>(n) * n, config_.channels());
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix)
      in.row(static_cast<Eigen::Index>(iy) * n + ix) = spatial(grid_.freq(ix), grid_.freq(iy)) * channel.transpose();
  JointSpectrum out = make_output(main_product(in));
  for (const AliasRow& row : alias_rows_)
    out.coeffs.row(row.k) =
        alias_row(row, [&](int kx, int ky) { return Eigen::RowVectorXcd(spatial(kx, ky) * channel.transpose()); });
  return out;
}

JointSpectrum group_conv_joint(const JointSpectrum& Fj, const FilterSpectrum& Gf) {
  if (!(Fj.config == Gf.config)) throw ShapeMismatch("group_conv_joint: input and filter configs differ");
  return JointConvPlan(Fj.spec, Gf).apply(Fj);
}

// ---------------------------------------------------------------- special case

namespace {

void check_special(const Eigen::MatrixXcd& Gc, double alpha, const FrequencyConfig& c, const GridSpec& g) {
  g.validate();
  c.validate();
  require_pinwheel_alpha(alpha);
  if (Gc.rows() != c.n_ang() || Gc.cols() != c.n_rad()) throw ShapeMismatch("filter coefficients do not match config");
  require_finite(Gc, "filter coefficients");
}

}  // namespace

SpatialGrid similarity_transform_2d(const Eigen::MatrixXcd& Gc, double alpha, const SimilarityParams& p,
                                    const FrequencyConfig& c, const GridSpec& g) {
  check_special(Gc, alpha, c, g);
  p.validate();
  const Eigen::VectorXcd vf = velocity_factor(c, alpha, 1, p);
  const double scale = g.n / (g.p * g.p);
  SpectralGrid C(g);
  for (int ia = 0; ia < c.n_ang(); ++ia)
    for (int ir = 0; ir < c.n_rad(); ++ir) {
      const Complex w = Gc(ia, ir) * vf(c.channel(ia, ir)) * c.d_omega() * scale;
      if (w == Complex(0.0)) continue;
      const PinwheelFrequency f{c.angular[ia], alpha, c.radial[ir]};
      const SpectralGrid T = symmetric_pinwheel_table(f, g);
      const Complex eps = T.coeffs(g.n / 2, g.n / 2);
      for (int iy = 0; iy < g.n; ++iy)
        for (int ix = 0; ix < g.n; ++ix) {
          const int kx = g.freq(ix), ky = g.freq(iy);
          if (2 * kx != -g.n && 2 * ky != -g.n) {
            C.coeffs(iy, ix) += w * T.coeffs(iy, ix) * translation_phase(g, kx, ky, p.dx, p.dy);
            continue;
          }
          // each alias carries its own translation phase
          C.coeffs(iy, ix) += w * alias_average(g, kx, ky, [&](int ax, int ay) {
            return (fourier_pinwheel_raw(ax, ay, f, g) + eps) * translation_phase(g, ax, ay, p.dx, p.dy);
          });
        }
    }
  return dft2_inverse(C);
}

JointSpectrum group_conv_special(const SpectralGrid& F, const Eigen::MatrixXcd& Gc, double alpha,
                                 const FrequencyConfig& c, const GridSpec& g) {
  check_special(Gc, alpha, c, g);
  if (!(F.spec == g) || F.coeffs.rows() != g.n || F.coeffs.cols() != g.n)
    throw ShapeMismatch("group_conv_special: input spectrum does not match grid");
  require_finite(F.coeffs, "group_conv_special");
  JointSpectrum out;
  out.spec = g;
  out.config = c;
  out.alpha = alpha;
  out.sign = -1;
  out.coeffs.resize(static_cast<Eigen::Index>(g.n) * g.n, c.channels());
  for (int ia = 0; ia < c.n_ang(); ++ia)
    for (int ir = 0; ir < c.n_rad(); ++ir) {
      const int ch = c.channel(ia, ir);
      const SpectralGrid H = symmetric_pinwheel_table({c.angular[ia], alpha, c.radial[ir]}, g);
      for (int iy = 0; iy < g.n; ++iy)
        for (int ix = 0; ix < g.n; ++ix)
          out.coeffs(static_cast<Eigen::Index>(iy) * g.n + ix, ch) = F.coeffs(iy, ix) * Gc(ia, ir) * H.coeffs(iy, ix);
    }
  return out;
}

// ---------------------------------------------------------------- joint transform

OrientationScaleField similarity_transform_joint(const FilterSpectrum& Gf, const SimilarityParams& p,
                                                 const GridSpec& g, const PolarSampling& velocity) {
  p.validate();
  const FrequencyConfig& c = Gf.config;
  JointConvPlan plan(g, Gf);
  // The plan computes 4 pi^2 d_omega sum F G H'; a unit input per channel carrying the rotation,
  // dilation and translation phases turns it into the continuous synthesis of the transformed filter.
  const Eigen::VectorXcd vf = velocity_factor(c, c.alpha_rho, 1, p);
  const double scale = g.n / (g.p * g.p) / (4.0 * kPi * kPi);
  const JointSpectrum out =
      plan.apply_separable(vf, [&](int kx, int ky) { return scale * translation_phase(g, kx, ky, p.dx, p.dy); });
  return synthesize_field(out, velocity);
}

JointSpectrum envelope_fix(const JointSpectrum& O, const OrientationScaleField& bias) {
  check_spectrum(O, "envelope_fix");
  if (!(bias.spec == O.spec)) throw ShapeMismatch("envelope_fix: bias grid differs");
  OrientationScaleField f = synthesize_field(O, bias.sampling);
  f.data = f.data.cwiseProduct(bias.data);
  return analyze_field(f, O.config, O.config.alpha_rho);
}

Eigen::MatrixXcd transform_joint_samples(const JointSpectrum& s, const SimilarityParams& p,
                                         const std::vector<Eigen::Vector2d>& points) {
  check_spectrum(s, "transform_joint_samples");
  p.validate();
  const GridSpec& g = s.spec;
  const int n = g.n;
  const Eigen::Index K = static_cast<Eigen::Index>(n) * n;
  const Eigen::VectorXcd vf = velocity_factor(s.config, s.alpha, s.sign, p);
  const Eigen::MatrixXcd scaled = s.coeffs * vf.asDiagonal();

  const double ct = std::cos(p.dtheta), st = std::sin(p.dtheta);
  Eigen::MatrixXcd out(static_cast<Eigen::Index>(points.size()), s.config.channels());
  constexpr Eigen::Index kBlock = 512;
  const auto np = static_cast<Eigen::Index>(points.size());
  for (Eigen::Index b0 = 0; b0 < np; b0 += kBlock) {
    const Eigen::Index nb = std::min(kBlock, np - b0);
    Eigen::MatrixXcd T(nb, K);
    parallel_for(static_cast<std::size_t>(nb), [&](std::size_t b, std::size_t e) {
      std::vector<Complex> ex(n), ey(n);
      for (std::size_t t = b; t < e; ++t) {
        const Eigen::Vector2d& x = points[static_cast<std::size_t>(b0) + t];
        const double ux = x.x() - p.dx, uy = x.y() - p.dy;
        const double yx = (ct * ux + st * uy) / p.a, yy = (-st * ux + ct * uy) / p.a;
        for (int j = 0; j < n; ++j) {
          const int k = g.freq(j);
          // The Nyquist term is split evenly between +-n/2, which keeps real data real.
          ex[j] = (2 * k == -n) ? Complex(std::cos(kTwoPi * k * yx / g.p)) : std::polar(1.0, kTwoPi * k * yx / g.p);
          ey[j] = (2 * k == -n) ? Complex(std::cos(kTwoPi * k * yy / g.p)) : std::polar(1.0, kTwoPi * k * yy / g.p);
        }
        for (int iy = 0; iy < n; ++iy)
          for (int ix = 0; ix < n; ++ix)
            T(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(iy) * n + ix) = ey[iy] * ex[ix] / static_cast<double>(n);
      }
    });
    out.middleRows(b0, nb) = T * scaled;
  }
  return out;
}

JointSpectrum transform_joint_spectrum(const JointSpectrum& s, const SimilarityParams& p) {
  const GridSpec& g = s.spec;
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(static_cast<std::size_t>(g.n) * g.n);
  for (int iy = 0; iy < g.n; ++iy)
    for (int ix = 0; ix < g.n; ++ix) pts.emplace_back(g.coord(ix), g.coord(iy));
  JointSpectrum out = s;
  out.coeffs = transform_joint_samples(s, p, pts);
  dft2_columns(out.coeffs, g.n, false);
  return out;
}

}  // namespace pw
