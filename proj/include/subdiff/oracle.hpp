#pragma once

#include <cstddef>
#include <vector>

#include "subdiff/kilbas_saigo.hpp"
#include "subdiff/spectral.hpp"

// Series-free numerical checks: product-integration Riemann-Liouville
// operators, a Volterra time stepper for the mode equation, and an MPFR
// reference for the Kilbas-Saigo series.
namespace subdiff::oracle {

/// Nodes t_i = T (i/n)^r, i = 0..n. Samples live on t_1..t_n; t_0 = 0 is only
/// the quadrature origin.
class GradedGrid {
 public:
  GradedGrid(double T, std::size_t n, double r);

  /// r = 2/alpha clipped to [1, 8].
  static double default_exponent(double alpha);

  double T() const noexcept { return T_; }
  std::size_t steps() const noexcept { return n_; }
  double exponent() const noexcept { return r_; }
  /// t_0 .. t_n.
  const std::vector<double>& nodes() const noexcept { return t_; }
  /// t_1 .. t_n.
  std::vector<double> points() const { return {t_.begin() + 1, t_.end()}; }

 private:
  double T_;
  std::size_t n_;
  double r_;
  std::vector<double> t_;
};

/// J^sigma h (sigma < 0) at t_1..t_n from samples h(t_1)..h(t_n).
///
/// h is split as c0 t^q + r with q = origin_exponent > -1 and
/// c0 = h(t_1)/t_1^q. The power is integrated exactly; r is taken as zero on
/// [0, t_1] and piecewise linear after, each piece integrated exactly against
/// the kernel. The result is linear in the samples; q should be the leading
/// power of h at 0 (0 for functions bounded and nonzero there).
std::vector<double> rl_integral_numeric(const GradedGrid& grid, const std::vector<double>& samples,
                                        double sigma, double origin_exponent = 0.0);

/// d/dt J^(alpha-1) h at t_1..t_n: three-point differences on the nonuniform
/// nodes, one-sided at t_1 and t_n, applied to t^-gamma J^(alpha-1) h with
/// gamma = origin_exponent + 1 - alpha and differentiated back by the product
/// rule. Needs n >= 8.
std::vector<double> rl_derivative_numeric(const GradedGrid& grid,
                                          const std::vector<double>& samples, double alpha,
                                          double origin_exponent = 0.0);

struct Residual {
  double max_abs = 0.0;   // over interior nodes t_2..t_{n-1}
  std::size_t node = 0;   // index i of the maximizer (t_i)
  double t = 0.0;
  std::size_t steps = 0;
  double exponent = 0.0;
};

/// max |d^alpha T + lambda t^beta T - t^mu f| over interior nodes, with
/// T sampled on t_1..t_n. For phi != 0 the term phi t^(alpha-1)/Gamma(alpha),
/// whose derivative vanishes, is removed before differentiating. When the
/// two leading powers of the rest, 2 alpha + beta - 1 and alpha + mu, are
/// both below 1, the smaller one is removed exactly (its coefficient follows
/// from balancing powers in the equation) and the other is fitted. With
/// phi = 0 and alpha + beta + mu < 1 the source power is removed exactly
/// and the next one, 2 alpha + beta + mu, is fitted.
///
/// The three terms are unbounded at 0 when alpha + beta + mu < 0; the
/// residual at the first nodes then need not decrease under refinement.
Residual ode_residual(const ProblemParams& params, double lambda_k, double phi_k, double f_k,
                      const GradedGrid& grid, const std::vector<double>& samples);
Residual ode_residual(const ProblemParams& params, double lambda_k, double f_k,
                      const GradedGrid& grid, const std::vector<double>& samples);

/// T(t_1..t_n) from the Volterra form
///   T = phi t^(alpha-1)/Gamma(alpha) + J^alpha [s^mu f - lambda s^beta T],
/// marching implicitly node by node on W = T - phi t^(alpha-1)/Gamma(alpha).
/// The forcing terms are integrated exactly; s^beta W has its leading power
/// subtracted and the rest is interpolated piecewise quadratically. The
/// first 32 intervals are subdivided for the march (finest at the origin);
/// values are returned on the grid nodes only.
std::vector<double> timestep_scalar_cauchy(const ProblemParams& params, double lambda_k,
                                           double phi_k, double f_k, const GradedGrid& grid);

/// Sum of the Kilbas-Saigo series with at least `digits` significant digits
/// (digits >= 30), rounded to double.
double highprec_series_eval(const mlf::KilbasSaigoParams& p, double z, int digits = 40);

}  // namespace subdiff::oracle
