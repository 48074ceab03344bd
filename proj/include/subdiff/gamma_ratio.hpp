#pragma once

#include <array>
#include <complex>

namespace subdiff {

/// G(z) = log Gamma(z) - log Gamma(z + shift) for a fixed shift > 0.
///
/// Small arguments are moved into the asymptotic region with the recurrence
/// Gamma(z+1) = z Gamma(z); there the difference is expanded as
///
///   G(z) ~ -shift * log z + sum_{n>=2} d_n z^(1-n),
///   d_n = (-1)^n (B_n(0) - B_n(shift)) / (n (n-1)),
///
/// which never forms the two large log-gamma values separately, so the
/// result keeps full relative accuracy for large z.
///
/// The complex overload is only defined modulo 2*pi*i; callers exponentiate.
class LogGammaRatio {
 public:
  static constexpr int kTerms = 20;
  static constexpr double kAsymptoticRadius = 12.0;

  explicit LogGammaRatio(double shift);

  double shift() const noexcept { return shift_; }

  /// Requires z > 0.
  double operator()(double z) const;
  /// Any z that is not a pole of Gamma(z) or Gamma(z + shift).
  std::complex<double> operator()(std::complex<double> z) const;

  // The pieces below use the expansion directly and are only accurate for
  // |z| >= kAsymptoticRadius with Re z > 0.

  std::complex<double> asymptotic(std::complex<double> z) const;
  /// Antiderivative of `asymptotic` (principal logarithm).
  std::complex<double> antiderivative(std::complex<double> z) const;
  /// order-th derivative of `asymptotic`, order >= 1.
  std::complex<double> derivative(std::complex<double> z, int order) const;

 private:
  double shift_;
  std::array<double, kTerms + 1> d_{};
};

/// Bernoulli polynomial B_n(x), 0 <= n <= 20.
double bernoulli_polynomial(int n, double x);

}  // namespace subdiff
