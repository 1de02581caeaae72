#include "pinwheel/grid.hpp"

#include <cmath>

namespace pw {

void GridSpec::validate() const {
  if (n < 8 || n % 2 != 0) throw DomainError("grid n must be even and >= 8");
  if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("grid period must be positive");
}

void require_finite(const Complex& z, const char* what) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError(std::string(what) + ": non-finite value");
}

void require_finite(const Eigen::MatrixXcd& m, const char* what) {
  if (!m.allFinite()) throw DomainError(std::string(what) + ": non-finite value");
}

}  // namespace pw
