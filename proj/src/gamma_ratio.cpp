#include "subdiff/gamma_ratio.hpp"

#include <cmath>

#include "subdiff/error.hpp"

namespace subdiff {

namespace {

constexpr std::array<double, 21> kBernoulli = {
    1.0,           -0.5,        1.0 / 6.0, 0.0, -1.0 / 30.0, 0.0,
    1.0 / 42.0,    0.0,         -1.0 / 30.0, 0.0, 5.0 / 66.0, 0.0,
    -691.0 / 2730.0, 0.0,       7.0 / 6.0, 0.0, -3617.0 / 510.0, 0.0,
    43867.0 / 798.0, 0.0,       -174611.0 / 330.0};

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace

double bernoulli_polynomial(int n, double x) {
  if (n < 0 || n > 20) throw_invalid("Bernoulli polynomial degree out of range");
  // Horner-like accumulation of sum_k C(n,k) B_k x^(n-k)
  double r = 0.0;
  for (int k = 0; k <= n; ++k) r = r * x + binomial(n, k) * kBernoulli[k];
  return r;
}

LogGammaRatio::LogGammaRatio(double shift) : shift_(shift) {
  if (!(shift > 0.0) || !std::isfinite(shift))
    throw_invalid("log-gamma ratio shift must be positive");
  for (int n = 2; n <= kTerms; ++n) {
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    d_[n] = sign * (kBernoulli[n] - bernoulli_polynomial(n, shift)) /
            (static_cast<double>(n) * (n - 1));
  }
}

double LogGammaRatio::operator()(double z) const {
  if (!(z > 0.0)) throw_invalid("log-gamma ratio needs a positive argument");
  double acc = 0.0;
  while (z < kAsymptoticRadius) {
    acc += std::log1p(shift_ / z);
    z += 1.0;
  }
  const double w = 1.0 / z;
  double poly = d_[kTerms];
  for (int n = kTerms - 1; n >= 2; --n) poly = poly * w + d_[n];
  return acc - shift_ * std::log(z) + poly * w;
}

std::complex<double> LogGammaRatio::operator()(std::complex<double> z) const {
  std::complex<double> prod{1.0, 0.0};
  if (!(std::abs(z) >= kAsymptoticRadius && z.real() >= 0.0)) {
    while (z.real() < kAsymptoticRadius) {
      prod *= 1.0 + shift_ / z;
      z += 1.0;
    }
  }
  return std::log(prod) + asymptotic(z);
}

std::complex<double> LogGammaRatio::asymptotic(std::complex<double> z) const {
  const std::complex<double> w = 1.0 / z;
  std::complex<double> poly = d_[kTerms];
  for (int n = kTerms - 1; n >= 2; --n) poly = poly * w + d_[n];
  return -shift_ * std::log(z) + poly * w;
}

std::complex<double> LogGammaRatio::antiderivative(std::complex<double> z) const {
  const std::complex<double> lz = std::log(z);
  std::complex<double> r = -shift_ * (z * lz - z) + d_[2] * lz;
  const std::complex<double> w = 1.0 / z;
  std::complex<double> wp = w;  // z^(2-n) for n = 3
  for (int n = 3; n <= kTerms; ++n) {
    r += d_[n] * wp / static_cast<double>(2 - n);
    wp *= w;
  }
  return r;
}

std::complex<double> LogGammaRatio::derivative(std::complex<double> z, int order) const {
  if (order < 1) throw_invalid("derivative order must be >= 1");
  const std::complex<double> w = 1.0 / z;
  const double sign_k = (order % 2 == 0) ? 1.0 : -1.0;
  std::complex<double> wk = std::pow(w, order);
  std::complex<double> r = -shift_ * (-sign_k) * factorial(order - 1) * wk;
  // d^k/dz^k z^(1-n) = (-1)^k (n+k-2)!/(n-2)! z^(1-n-k)
  std::complex<double> wp = wk * w;  // z^(-1-k) for n = 2
  for (int n = 2; n <= kTerms; ++n) {
    r += d_[n] * sign_k * (factorial(n + order - 2) / factorial(n - 2)) * wp;
    wp *= w;
  }
  return r;
}

}  // namespace subdiff
