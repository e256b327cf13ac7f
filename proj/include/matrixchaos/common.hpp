#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>

namespace mxc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// x*log(x) with the entropy convention 0*log(0) = 0.
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

/// Complex value m * 2^e, kept factored so that determinants of large
/// matrices never overflow the double range.
struct ScaledComplex {
  Complex mantissa{1.0, 0.0};
  long exponent2 = 0;

  void multiply(Complex factor) {
    mantissa *= factor;
    normalize();
  }

  void normalize() {
    const double a = std::abs(mantissa);
    if (a == 0.0) {
      exponent2 = 0;
      return;
    }
    int e = 0;
    std::frexp(a, &e);
    if (e > 60 || e < -60) {
      mantissa = Complex(std::ldexp(mantissa.real(), -e),
                         std::ldexp(mantissa.imag(), -e));
      exponent2 += e;
    }
  }

  ScaledComplex times(const ScaledComplex& other) const {
    ScaledComplex out = *this;
    out.exponent2 += other.exponent2;
    out.multiply(other.mantissa);
    return out;
  }

  /// Value as a plain complex double; overflows to inf for huge exponents.
  Complex value() const {
    return Complex(std::ldexp(mantissa.real(), static_cast<int>(clamp_exp())),
                   std::ldexp(mantissa.imag(), static_cast<int>(clamp_exp())));
  }

  double abs() const { return std::ldexp(std::abs(mantissa), static_cast<int>(clamp_exp())); }

  /// log of the absolute value, always finite for nonzero mantissa.
  double log_abs() const {
    const double a = std::abs(mantissa);
    if (a == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(a) + static_cast<double>(exponent2) * std::numbers::ln2;
  }

 private:
  long clamp_exp() const {
    if (exponent2 > 4000) return 4000;
    if (exponent2 < -4000) return -4000;
    return exponent2;
  }
};

/// Determinant of a complex matrix via LU with scaled accumulation.
inline ScaledComplex scaled_determinant(const ComplexMatrix& m) {
  if (m.rows() == 0) return ScaledComplex{};
  Eigen::PartialPivLU<ComplexMatrix> lu(m);
  ScaledComplex det;
  det.mantissa = Complex(static_cast<double>(lu.permutationP().determinant()), 0.0);
  const auto diag = lu.matrixLU().diagonal();
  for (Eigen::Index i = 0; i < diag.size(); ++i) det.multiply(diag[i]);
  return det;
}

}  // namespace mxc
