#include "pinwheel/specmath.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace pw {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLanczosG = 607.0 / 128.0;

// Lanczos coefficients for g = 607/128, n = 15 (Godfrey).
constexpr std::array<double, 15> kLanczos = {
    0.99999999999999709182,     57.156235665862923517,      -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,    0.33994649984811888699e-4,
    0.46523628927048575665e-4,  -0.98374475304879564677e-4, 0.15808870322491248884e-3,
    -0.21026444172410488319e-3, 0.21743961811521264320e-3,  -0.16431810653676389022e-3,
    0.84418223983852743293e-4,  -0.26190838401581408670e-4, 0.36899182659531622704e-5};

void check_pole(Complex z) {
  if (z.real() <= 0.5 && std::abs(z.imag()) < 1e-12) {
    const double nearest = std::round(z.real());
    if (nearest <= 0.0 && std::abs(z.real() - nearest) < 1e-12)
      throw PoleError("Gamma pole at non-positive integer");
  }
}

// log Gamma for Re z >= 1/2.
Complex lanczos_log_gamma(Complex z) {
  z -= 1.0;
  Complex x = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) x += kLanczos[i] / (z + static_cast<double>(i));
  const Complex t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

// sin(pi z) evaluated without losing the integer part of Re z.
Complex sin_pi(Complex z) {
  const double k = std::round(z.real());
  const Complex w(z.real() - k, z.imag());
  const Complex s = std::sin(kPi * w);
  return (static_cast<long long>(k) % 2 == 0) ? s : -s;
}

}  // namespace

Complex complex_log_gamma(Complex z) {
  require_finite(z, "complex_log_gamma");
  check_pole(z);
  if (z.real() < 0.5) {
    // Gamma(z) Gamma(1-z) = pi / sin(pi z)
    return std::log(kPi) - std::log(sin_pi(z)) - lanczos_log_gamma(1.0 - z);
  }
  return lanczos_log_gamma(z);
}

Complex complex_gamma(Complex z) {
  require_finite(z, "complex_gamma");
  check_pole(z);
  if (z.real() < 0.5) return kPi / (sin_pi(z) * std::exp(lanczos_log_gamma(1.0 - z)));
  return std::exp(lanczos_log_gamma(z));
}

Complex eval_pinwheel(double phi, double rho, const PinwheelFrequency& f) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("eval_pinwheel: rho must be positive");
  if (!std::isfinite(phi)) throw DomainError("eval_pinwheel: phi must be finite");
  const double lr = std::log(rho);
  return std::exp(Complex(f.alpha * lr, f.omega_phi * phi + f.omega_rho * lr));
}

SpatialGrid sample_pinwheel(const GridSpec& g, const PinwheelFrequency& f) {
  g.validate();
  SpatialGrid out(g);
  for (int iy = 0; iy < g.n; ++iy) {
    for (int ix = 0; ix < g.n; ++ix) {
      const double x = g.coord(ix), y = g.coord(iy);
      const double rho = std::hypot(x, y);
      out.data(iy, ix) = rho > 0.0 ? eval_pinwheel(std::atan2(y, x), rho, f) : Complex(0.0);
    }
  }
  return out;
}

void require_pinwheel_alpha(double alpha) {
  if (!(alpha > -2.0 && alpha < -0.5))
    throw DomainError("pinwheel alpha must lie in (-2, -0.5)");
}

Complex pinwheel_gamma_factor(int m, Complex s) {
  const int am = std::abs(m);
  static const Complex kMinusI[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
  const Complex lg = complex_log_gamma(0.5 * (2.0 + static_cast<double>(am) + s)) - complex_log_gamma(0.5 * (static_cast<double>(am) - s));
  return kPi * kMinusI[am % 4] * std::exp(lg);
}

namespace {

Complex raw_with_factor(int wx, int wy, const PinwheelFrequency& f, const GridSpec& g, Complex factor) {
  if (wx == 0 && wy == 0) return 0.0;
  const double rb = std::hypot(static_cast<double>(wx), static_cast<double>(wy));
  const double pb = std::atan2(static_cast<double>(wy), static_cast<double>(wx));
  const double L = std::log(g.p / (kPi * rb));
  const Complex e = (2.0 + f.s()) * L + Complex(0.0, f.omega_phi * pb);
  return factor * std::exp(e);
}

Complex epsilon_with_factor(const PinwheelFrequency& f, const GridSpec& g, Complex factor) {
  Complex sum = 0.0;
  for (int iy = 0; iy < g.n; ++iy)
    for (int ix = 0; ix < g.n; ++ix) sum += raw_with_factor(g.freq(ix), g.freq(iy), f, g, factor);
  return -sum / (static_cast<double>(g.n) * g.n);
}

}  // namespace

Complex fourier_pinwheel_raw(int omega_x, int omega_y, const PinwheelFrequency& f, const GridSpec& g) {
  g.validate();
  require_pinwheel_alpha(f.alpha);
  return raw_with_factor(omega_x, omega_y, f, g, pinwheel_gamma_factor(f.omega_phi, f.s()));
}

Complex compute_epsilon(const PinwheelFrequency& f, const GridSpec& g) {
  g.validate();
  require_pinwheel_alpha(f.alpha);
  return epsilon_with_factor(f, g, pinwheel_gamma_factor(f.omega_phi, f.s()));
}

Complex fourier_pinwheel_coeff(int omega_x, int omega_y, const PinwheelFrequency& f, const GridSpec& g) {
  g.validate();
  require_pinwheel_alpha(f.alpha);
  const Complex factor = pinwheel_gamma_factor(f.omega_phi, f.s());
  return raw_with_factor(omega_x, omega_y, f, g, factor) + epsilon_with_factor(f, g, factor);
}

SpectralGrid fourier_pinwheel_table(const PinwheelFrequency& f, const GridSpec& g) {
  g.validate();
  require_pinwheel_alpha(f.alpha);
  const Complex factor = pinwheel_gamma_factor(f.omega_phi, f.s());
  SpectralGrid out(g);
  Complex sum = 0.0;
  for (int iy = 0; iy < g.n; ++iy) {
    for (int ix = 0; ix < g.n; ++ix) {
      out.coeffs(iy, ix) = raw_with_factor(g.freq(ix), g.freq(iy), f, g, factor);
      sum += out.coeffs(iy, ix);
    }
  }
  out.coeffs.array() -= sum / (static_cast<double>(g.n) * g.n);
  return out;
}

SpectralGrid symmetric_pinwheel_table(const PinwheelFrequency& f, const GridSpec& g) {
  g.validate();
  require_pinwheel_alpha(f.alpha);
  const Complex factor = pinwheel_gamma_factor(f.omega_phi, f.s());
  SpectralGrid out(g);
  Complex sum = 0.0;
  for (int iy = 0; iy < g.n; ++iy) {
    for (int ix = 0; ix < g.n; ++ix) {
      out.coeffs(iy, ix) = alias_average(g, g.freq(ix), g.freq(iy),
                                         [&](int kx, int ky) { return raw_with_factor(kx, ky, f, g, factor); });
      sum += out.coeffs(iy, ix);
    }
  }
  out.coeffs.array() -= sum / (static_cast<double>(g.n) * g.n);
  return out;
}

}  // namespace pw
