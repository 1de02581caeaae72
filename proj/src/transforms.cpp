#include "pinwheel/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unsupported/Eigen/FFT>

#include "pinwheel/parallel.hpp"

namespace pw {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

// ---------------------------------------------------------------- configs

FrequencyConfig FrequencyConfig::make(int K, double omega_max, double step, double alpha_rho, double alpha_r) {
  if (K < 1) throw DomainError("K must be positive");
  if (!(step > 0.0) || !(omega_max > 0.0)) throw DomainError("radial range must be positive");
  FrequencyConfig c;
  for (int m = -K; m < K; ++m) c.angular.push_back(m);
  const int nr = static_cast<int>(std::lround(2.0 * omega_max / step));
  for (int i = 0; i < nr; ++i) c.radial.push_back(-omega_max + i * step);
  c.alpha_rho = alpha_rho;
  c.alpha_r = alpha_r;
  c.validate();
  return c;
}

int FrequencyConfig::max_abs_angular() const {
  int m = 0;
  for (int a : angular) m = std::max(m, std::abs(a));
  return m;
}

void FrequencyConfig::validate() const {
  if (angular.empty() || radial.empty()) throw DomainError("frequency sets must be non-empty");
  for (std::size_t i = 1; i < angular.size(); ++i)
    if (angular[i] != angular[i - 1] + 1) throw DomainError("angular frequencies must be contiguous");
  const double d = d_omega();
  if (!(d > 0.0)) throw DomainError("radial frequencies must increase");
  for (std::size_t i = 1; i < radial.size(); ++i)
    if (std::abs(radial[i] - radial[i - 1] - d) > 1e-9 * std::max(1.0, d))
      throw DomainError("radial frequencies must be uniformly spaced");
  if (!std::isfinite(alpha_rho) || !std::isfinite(alpha_r)) throw DomainError("alpha must be finite");
}

double PolarSampling::phi(int j) const { return kTwoPi * j / n_phi; }
double PolarSampling::d_phi() const { return kTwoPi / n_phi; }
double PolarSampling::d_logrho() const {
  return n_logrho > 1 ? (logrho_max - logrho_min) / (n_logrho - 1) : 1.0;
}
double PolarSampling::logrho(int l) const { return n_logrho > 1 ? logrho_min + l * d_logrho() : logrho_min; }
double PolarSampling::rho(int l) const { return std::exp(logrho(l)); }

double PolarSampling::weight(int l) const {
  if (n_logrho == 1) return 1.0;
  const double w = (l == 0 || l == n_logrho - 1) ? 0.5 : 1.0;
  return w * d_logrho();
}

void PolarSampling::validate() const {
  if (n_phi < 1 || n_logrho < 1) throw DomainError("polar sampling must be non-empty");
  if (!std::isfinite(logrho_min) || !std::isfinite(logrho_max)) throw DomainError("log window must be finite");
  if (n_logrho > 1 && !(logrho_max > logrho_min)) throw DomainError("log window must be increasing");
}

void PolarSampling::require_nyquist(const FrequencyConfig& c) const {
  if (n_phi < 2 * c.max_abs_angular())
    throw NyquistError("n_phi=" + std::to_string(n_phi) + " below 2*max|omega_phi|=" +
                       std::to_string(2 * c.max_abs_angular()));
}

// ---------------------------------------------------------------- spatial DFT

namespace {

// Unitary centred 2D DFT of one n x n image stored row-major (index iy * n + ix).
// The centred index shift reduces to (-1)^(jx+jy) before and (-1)^(kx+ky) after the FFT.
void dft2_image(Eigen::FFT<double>& fft, Complex* img, int n, bool inverse, std::vector<Complex>& a,
                std::vector<Complex>& b) {
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix)
      if ((ix + iy) & 1) img[iy * n + ix] = -img[iy * n + ix];
  for (int iy = 0; iy < n; ++iy) {
    Complex* row = img + static_cast<std::ptrdiff_t>(iy) * n;
    std::copy(row, row + n, a.begin());
    if (inverse) fft.inv(b.data(), a.data(), n); else fft.fwd(b.data(), a.data(), n);
    std::copy(b.begin(), b.end(), row);
  }
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) a[iy] = img[iy * n + ix];
    if (inverse) fft.inv(b.data(), a.data(), n); else fft.fwd(b.data(), a.data(), n);
    for (int iy = 0; iy < n; ++iy) img[iy * n + ix] = b[iy];
  }
  const double scale = 1.0 / n;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) img[iy * n + ix] *= ((ix + iy) & 1) ? -scale : scale;
}

Eigen::FFT<double> make_fft() {
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  return fft;
}

}  // namespace

void dft2_columns(Eigen::MatrixXcd& m, int n, bool inverse) {
  if (m.rows() != static_cast<Eigen::Index>(n) * n) throw ShapeMismatch("dft2_columns: rows must be n*n");
  parallel_for(static_cast<std::size_t>(m.cols()), [&](std::size_t b, std::size_t e) {
    auto fft = make_fft();
    std::vector<Complex> ta(n), tb(n);
    for (std::size_t c = b; c < e; ++c) dft2_image(fft, m.col(static_cast<Eigen::Index>(c)).data(), n, inverse, ta, tb);
  });
}

namespace {

Eigen::MatrixXcd to_flat(const Eigen::MatrixXcd& img) {
  const Eigen::Index n = img.rows();
  Eigen::MatrixXcd flat(n * n, 1);
  for (Eigen::Index iy = 0; iy < n; ++iy)
    for (Eigen::Index ix = 0; ix < n; ++ix) flat(iy * n + ix, 0) = img(iy, ix);
  return flat;
}

Eigen::MatrixXcd from_flat(const Eigen::MatrixXcd& flat, Eigen::Index col, int n) {
  Eigen::MatrixXcd img(n, n);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) img(iy, ix) = flat(static_cast<Eigen::Index>(iy) * n + ix, col);
  return img;
}

}  // namespace

SpectralGrid dft2_forward(const SpatialGrid& f) {
  f.spec.validate();
  if (f.data.rows() != f.spec.n || f.data.cols() != f.spec.n) throw ShapeMismatch("dft2_forward: data is not n x n");
  require_finite(f.data, "dft2_forward");
  Eigen::MatrixXcd flat = to_flat(f.data);
  dft2_columns(flat, f.spec.n, false);
  SpectralGrid out;
  out.spec = f.spec;
  out.coeffs = from_flat(flat, 0, f.spec.n);
  return out;
}

SpatialGrid dft2_inverse(const SpectralGrid& F) {
  F.spec.validate();
  if (F.coeffs.rows() != F.spec.n || F.coeffs.cols() != F.spec.n)
    throw ShapeMismatch("dft2_inverse: coeffs is not n x n");
  require_finite(F.coeffs, "dft2_inverse");
  Eigen::MatrixXcd flat = to_flat(F.coeffs);
  dft2_columns(flat, F.spec.n, true);
  SpatialGrid out;
  out.spec = F.spec;
  out.data = from_flat(flat, 0, F.spec.n);
  return out;
}

// ---------------------------------------------------------------- AFMT

Eigen::MatrixXcd afmt_analysis_matrix(const PolarSampling& s, const FrequencyConfig& c, double alpha) {
  s.validate();
  c.validate();
  s.require_nyquist(c);
  // (1/4pi^2) sum_j sum_l f e^{-i m phi_j} rho_l^{-(alpha + i omega)} dphi w_l
  Eigen::MatrixXcd A(c.channels(), s.size());
  const double norm = s.d_phi() / (4.0 * kPi * kPi);
  for (int ia = 0; ia < c.n_ang(); ++ia) {
    for (int ir = 0; ir < c.n_rad(); ++ir) {
      const int ch = c.channel(ia, ir);
      for (int j = 0; j < s.n_phi; ++j) {
        for (int l = 0; l < s.n_logrho; ++l) {
          const double u = s.logrho(l);
          const Complex e(-alpha * u, -c.angular[ia] * s.phi(j) - c.radial[ir] * u);
          A(ch, s.index(j, l)) = std::exp(e) * (norm * s.weight(l));
        }
      }
    }
  }
  return A;
}

Eigen::MatrixXcd afmt_synthesis_matrix(const PolarSampling& s, const FrequencyConfig& c, double alpha, int sign) {
  s.validate();
  c.validate();
  if (sign != 1 && sign != -1) throw DomainError("synthesis sign must be +1 or -1");
  Eigen::MatrixXcd S(s.size(), c.channels());
  const double dw = c.d_omega();
  for (int j = 0; j < s.n_phi; ++j) {
    for (int l = 0; l < s.n_logrho; ++l) {
      const double u = s.logrho(l);
      for (int ia = 0; ia < c.n_ang(); ++ia) {
        for (int ir = 0; ir < c.n_rad(); ++ir) {
          const Complex e(sign * alpha * u, sign * (c.angular[ia] * s.phi(j) + c.radial[ir] * u));
          S(s.index(j, l), c.channel(ia, ir)) = std::exp(e) * dw;
        }
      }
    }
  }
  return S;
}

Eigen::MatrixXcd afmt_forward(const Eigen::MatrixXcd& f_polar, const PolarSampling& s, const FrequencyConfig& c,
                              double alpha) {
  if (f_polar.rows() != s.n_phi || f_polar.cols() != s.n_logrho)
    throw ShapeMismatch("afmt_forward: samples do not match polar sampling");
  require_finite(f_polar, "afmt_forward");
  const Eigen::MatrixXcd A = afmt_analysis_matrix(s, c, alpha);
  Eigen::VectorXcd flat(s.size());
  for (int j = 0; j < s.n_phi; ++j)
    for (int l = 0; l < s.n_logrho; ++l) flat(s.index(j, l)) = f_polar(j, l);
  const Eigen::VectorXcd coef = A * flat;
  Eigen::MatrixXcd out(c.n_ang(), c.n_rad());
  for (int ia = 0; ia < c.n_ang(); ++ia)
    for (int ir = 0; ir < c.n_rad(); ++ir) out(ia, ir) = coef(c.channel(ia, ir));
  return out;
}

Eigen::VectorXcd afmt_inverse(const Eigen::MatrixXcd& coeffs, const FrequencyConfig& c, double alpha,
                              const std::vector<PolarPoint>& targets) {
  c.validate();
  if (coeffs.rows() != c.n_ang() || coeffs.cols() != c.n_rad())
    throw ShapeMismatch("afmt_inverse: coefficients do not match frequency config");
  Eigen::VectorXcd out(static_cast<Eigen::Index>(targets.size()));
  const double dw = c.d_omega();
  for (std::size_t t = 0; t < targets.size(); ++t) {
    if (!(targets[t].rho > 0.0)) throw DomainError("afmt_inverse: target rho must be positive");
    const double u = std::log(targets[t].rho);
    Complex acc = 0.0;
    for (int ia = 0; ia < c.n_ang(); ++ia)
      for (int ir = 0; ir < c.n_rad(); ++ir)
        acc += coeffs(ia, ir) * std::exp(Complex(alpha * u, c.angular[ia] * targets[t].phi + c.radial[ir] * u));
    out(static_cast<Eigen::Index>(t)) = acc * dw;
  }
  return out;
}

Eigen::MatrixXcd afmt_inverse_grid(const Eigen::MatrixXcd& coeffs, const FrequencyConfig& c, double alpha,
                                   const PolarSampling& s) {
  std::vector<PolarPoint> targets;
  targets.reserve(static_cast<std::size_t>(s.size()));
  for (int j = 0; j < s.n_phi; ++j)
    for (int l = 0; l < s.n_logrho; ++l) targets.push_back({s.phi(j), s.rho(l)});
  const Eigen::VectorXcd v = afmt_inverse(coeffs, c, alpha, targets);
  Eigen::MatrixXcd out(s.n_phi, s.n_logrho);
  for (int j = 0; j < s.n_phi; ++j)
    for (int l = 0; l < s.n_logrho; ++l) out(j, l) = v(s.index(j, l));
  return out;
}

// ---------------------------------------------------------------- joint AFMT

FilterSpectrum joint_afmt_forward(const JointPolarField& field, const FrequencyConfig& c) {
  const PolarSampling& ps = field.position;
  const PolarSampling& vs = field.velocity;
  ps.validate();
  vs.validate();
  c.validate();
  ps.require_nyquist(c);
  vs.require_nyquist(c);
  if (field.data.rows() != ps.size() || field.data.cols() != vs.size())
    throw ShapeMismatch("joint_afmt_forward: data does not match samplings");
  require_finite(field.data, "joint_afmt_forward");

  // In the orthogonal coordinates (phi, rho, psi = theta - phi, v = r / rho) the basis is
  // e^{i m phi} rho^{s_rho} e^{i n psi} v^{s_r}. The change of variables has unit Jacobian in
  // (phi, log rho, theta, log r), so the quadrature runs on the product grid with
  //   e^{-i(m-n) phi} rho^{-(s_rho - s_r)} e^{-i n theta} r^{-s_r}.
  const double da = c.alpha_rho - c.alpha_r;
  const int C = c.channels();

  // Velocity stage: A(pos, (n, omega_r)) = sum_{j,q} g e^{-i n theta_j} r_q^{-(alpha_r + i omega_r)} dtheta w_q.
  Eigen::MatrixXcd V(vs.size(), C);
  for (int j = 0; j < vs.n_phi; ++j)
    for (int q = 0; q < vs.n_logrho; ++q) {
      const double u = vs.logrho(q);
      for (int ia = 0; ia < c.n_ang(); ++ia)
        for (int ir = 0; ir < c.n_rad(); ++ir)
          V(vs.index(j, q), c.channel(ia, ir)) =
              std::exp(Complex(-c.alpha_r * u, -c.angular[ia] * vs.phi(j) - c.radial[ir] * u)) *
              (vs.d_phi() * vs.weight(q));
    }
  const Eigen::MatrixXcd A = field.data * V;

  FilterSpectrum out;
  out.config = c;
  out.coeffs = Eigen::MatrixXcd::Zero(C, C);
  const double norm = 1.0 / std::pow(kTwoPi, 4);
  parallel_for(static_cast<std::size_t>(C), [&](std::size_t b, std::size_t e) {
    Eigen::MatrixXcd E(c.n_ang(), ps.n_phi), B(ps.n_phi, ps.n_logrho), R(ps.n_logrho, c.n_rad());
    for (std::size_t oc = b; oc < e; ++oc) {
      const int ia_out = static_cast<int>(oc) / c.n_rad();
      const int ir_out = static_cast<int>(oc) % c.n_rad();
      const int n_out = c.angular[ia_out];
      const double w_out = c.radial[ir_out];
      for (int i = 0; i < ps.n_phi; ++i)
        for (int l = 0; l < ps.n_logrho; ++l) B(i, l) = A(ps.index(i, l), static_cast<Eigen::Index>(oc));
      for (int ia = 0; ia < c.n_ang(); ++ia)
        for (int i = 0; i < ps.n_phi; ++i)
          E(ia, i) = std::polar(ps.d_phi(), -(c.angular[ia] - n_out) * ps.phi(i));
      for (int l = 0; l < ps.n_logrho; ++l) {
        const double u = ps.logrho(l);
        for (int ir = 0; ir < c.n_rad(); ++ir)
          R(l, ir) = std::exp(Complex(-da * u, -(c.radial[ir] - w_out) * u)) * ps.weight(l);
      }
      const Eigen::MatrixXcd G = (E * B) * R;  // (m, omega)
      for (int ia = 0; ia < c.n_ang(); ++ia)
        for (int ir = 0; ir < c.n_rad(); ++ir)
          out.coeffs(c.channel(ia, ir), static_cast<Eigen::Index>(oc)) = G(ia, ir) * norm;
    }
  });
  return out;
}

// ---------------------------------------------------------------- joint spectra

JointSpectrum lift_2d_input(const SpatialGrid& f, const FrequencyConfig& c) {
  c.validate();
  const SpectralGrid F = dft2_forward(f);
  const int n = f.spec.n;
  JointSpectrum out;
  out.spec = f.spec;
  out.config = c;
  out.alpha = c.alpha_rho;
  out.coeffs.resize(static_cast<Eigen::Index>(n) * n, c.channels());
  // The delta at (phi = 0, rho = 1) has every AFMT coefficient equal to 1/(4 pi^2).
  const double w = 1.0 / (4.0 * kPi * kPi);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) out.coeffs.row(static_cast<Eigen::Index>(iy) * n + ix).setConstant(F.coeffs(iy, ix) * w);
  return out;
}

JointSpectrum analyze_field(const OrientationScaleField& f, const FrequencyConfig& c, double alpha) {
  f.spec.validate();
  if (f.data.rows() != static_cast<Eigen::Index>(f.spec.n) * f.spec.n || f.data.cols() != f.sampling.size())
    throw ShapeMismatch("analyze_field: data does not match grid and sampling");
  const Eigen::MatrixXcd A = afmt_analysis_matrix(f.sampling, c, alpha);
  JointSpectrum out;
  out.spec = f.spec;
  out.config = c;
  out.alpha = alpha;
  out.coeffs = f.data * A.transpose();
  dft2_columns(out.coeffs, f.spec.n, false);
  return out;
}

OrientationScaleField synthesize_field(const JointSpectrum& s, const PolarSampling& sampling) {
  s.spec.validate();
  if (s.coeffs.rows() != static_cast<Eigen::Index>(s.spec.n) * s.spec.n || s.coeffs.cols() != s.config.channels())
    throw ShapeMismatch("synthesize_field: coefficients do not match grid and config");
  const Eigen::MatrixXcd S = afmt_synthesis_matrix(sampling, s.config, s.alpha, s.sign);
  Eigen::MatrixXcd spatial = s.coeffs;
  dft2_columns(spatial, s.spec.n, true);
  OrientationScaleField out;
  out.spec = s.spec;
  out.sampling = sampling;
  out.data = spatial * S.transpose();
  return out;
}

}  // namespace pw
