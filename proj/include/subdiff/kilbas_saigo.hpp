#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

#include "subdiff/gamma_ratio.hpp"

namespace subdiff::mlf {

/// Index triple of E_{alpha,m,l}(z) = sum_k c_k z^k with
/// c_0 = 1 and c_{k+1} = c_k Gamma(alpha(km+l)+1) / Gamma(alpha(km+l+1)+1).
struct KilbasSaigoParams {
  double alpha = 0.5;
  double m = 1.0;
  double l = 0.0;

  /// Throws invalid-params unless 0 < alpha < 1, m > 0, l > -1/alpha.
  void validate() const;
};

enum class PrecisionMode { standard, extended, contour };
enum class BoundCheck { within, violated, not_applicable };

const char* to_string(PrecisionMode mode) noexcept;
const char* to_string(BoundCheck check) noexcept;

struct EvalReport {
  double value = 0.0;
  std::size_t terms_used = 0;  // series terms, or contour nodes
  double max_partial_magnitude = 0.0;
  PrecisionMode precision_mode = PrecisionMode::standard;
  BoundCheck bound_check = BoundCheck::not_applicable;
};

enum class Method { automatic, series, extended, contour };

struct EvalOptions {
  Method method = Method::automatic;
  double rel_tol = 1e-15;           // series truncation threshold
  std::size_t max_terms = 20000;
  double cancellation_guard = 1e2;  // max |partial sum| / |result|
  double bound_tol = 1e-12;
  bool enforce_bounds = false;      // throw evaluation-failure on violation
  bool allow_contour = true;        // automatic mode may use the contour
};

/// Which envelope applies on the negative axis for the given indices.
enum class Envelope { upper_only, sandwich, none };
Envelope envelope_for(const KilbasSaigoParams& p);

/// c_0..c_n. Entries underflow to 0 once c_k < DBL_MIN.
std::vector<double> coefficients(const KilbasSaigoParams& p, std::size_t n);
/// log c_0 .. log c_n.
std::vector<double> log_coefficients(const KilbasSaigoParams& p, std::size_t n);

/// (1 + Gamma(1+alpha m)/Gamma(1+alpha(1+m)) t)^-(1+1/m); needs l = m - 1/alpha.
double upper_bound_prop1(const KilbasSaigoParams& p, double t);

/// Lower/upper envelope of E_{alpha,m,l}(-t) for l > m - 1/alpha.
std::pair<double, double> bounds_prop2(const KilbasSaigoParams& p, double t);

/// Evaluator for one index triple.
///
/// Small arguments are summed directly. On the negative axis the series
/// alternates with terms that grow like exp(alpha t^(1/alpha) / (alpha m))
/// before decaying, so beyond the cancellation guard the value is taken from
/// the Mellin-Barnes integral
///
///   E(-t) = (1/2 pi i) int_{c-i inf}^{c+i inf} pi/sin(pi s) c(-s) t^(-s) ds,
///
/// where c(u) interpolates the coefficients (Gauss-type product with an
/// Euler-Maclaurin tail) and 0 < c < min(1, first pole of c(-s)). The
/// quadrature nodes are built once per instance, on first use.
///
/// Immutable after construction; safe to share between threads.
class KilbasSaigoFunction {
 public:
  explicit KilbasSaigoFunction(const KilbasSaigoParams& p, EvalOptions opts = {});

  const KilbasSaigoParams& params() const noexcept { return p_; }
  const EvalOptions& options() const noexcept { return opts_; }

  EvalReport eval(double z) const;
  double operator()(double z) const { return eval(z).value; }

  /// Interpolated log c(u) (c(k) = c_k), defined modulo 2 pi i.
  /// Requires Re u >= -1 and u away from the poles of c.
  std::complex<double> log_coefficient(std::complex<double> u) const;

  std::size_t contour_nodes() const;
  double contour_line() const;

 private:
  struct Line;
  struct Contour;

  bool series(double z, EvalReport& out) const;
  EvalReport extended(double z) const;
  EvalReport contour(double t) const;
  const Contour& contour_data() const;
  double first_singularity() const;
  void build_line(Line& c, double line, double upper) const;
  double direct_real(std::size_t j) const;
  void classify(double z, EvalReport& r) const;

  KilbasSaigoParams p_;
  EvalOptions opts_;
  LogGammaRatio ratio_;
  double a_ = 0.0;  // alpha m
  double b_ = 0.0;  // alpha l + 1
  std::size_t direct_terms_ = 0;
  std::vector<double> direct_real_;  // ratio_(a j + b), j < direct_terms_
  std::shared_ptr<Contour> contour_;
};

/// One-shot evaluation; builds a temporary KilbasSaigoFunction.
EvalReport eval(const KilbasSaigoParams& p, double z, EvalOptions opts = {});

/// Classical E_{alpha,beta}(z) = sum z^k / Gamma(alpha k + beta).
/// Direct summation where it is free of cancellation; otherwise (z < 0,
/// 0 < alpha <= 1) numerical inversion of the Laplace transform
/// s^(alpha-beta)/(s^alpha - z) on a parabolic contour.
double two_param_ml(double alpha, double beta, double z);

}  // namespace subdiff::mlf
