#include "subdiff/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "detail/mpfr.hpp"
#include "detail/summation.hpp"
#include "subdiff/error.hpp"

namespace subdiff::oracle {

GradedGrid::GradedGrid(double T, std::size_t n, double r) : T_(T), n_(n), r_(r) {
  if (!(T > 0.0) || !std::isfinite(T)) throw_invalid("grid end T must be positive and finite");
  if (n < 2) throw_invalid("graded grid needs at least 2 steps");
  if (!(r >= 1.0) || !std::isfinite(r)) throw_invalid("grading exponent must satisfy r >= 1");
  t_.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i)
    t_[i] = T * std::pow(static_cast<double>(i) / static_cast<double>(n), r);
  t_[n] = T;
  for (std::size_t i = 1; i <= n; ++i)
    if (!(t_[i] > t_[i - 1])) throw_invalid("graded grid nodes collapse; use fewer steps");
}

double GradedGrid::default_exponent(double alpha) {
  return std::clamp(2.0 / alpha, 1.0, 8.0);
}

namespace {

// Kernel moments of one linear piece, u = t_i - xi in [A, A + D]:
//   left  = D int_0^1 (A + D s)^(nu-1) s ds       (multiplies h(t_{j-1}))
//   right = D int_0^1 (A + D s)^(nu-1) (1 - s) ds (multiplies h(t_j))
std::pair<double, double> linear_piece(double A, double D, double nu) {
  if (A == 0.0) {
    const double p = std::pow(D, nu);
    return {p / (nu + 1.0), p / (nu * (nu + 1.0))};
  }
  const double x = D / A;
  if (x <= 0.5) {
    // binomial series of (1 + x s)^(nu-1)
    double b = 1.0, xn = 1.0, left = 0.0, right = 0.0;
    for (int n = 0; n < 200; ++n) {
      const double c = b * xn;
      const double dl = c / (n + 2.0);
      const double dr = c / ((n + 1.0) * (n + 2.0));
      left += dl;
      right += dr;
      if (std::abs(dl) < 1e-18 * std::abs(left) && std::abs(dr) < 1e-18 * std::abs(right)) break;
      b *= (nu - 1.0 - n) / (n + 1.0);
      xn *= x;
    }
    const double scale = std::pow(A, nu - 1.0) * D;
    return {scale * left, scale * right};
  }
  const double lp = std::log1p(x);
  const double i0 = std::pow(A, nu) * std::expm1(nu * lp) / nu;
  const double i1 = std::pow(A, nu + 1.0) * std::expm1((nu + 1.0) * lp) / (nu + 1.0);
  const double B = A + D;
  return {(i1 - A * i0) / D, (B * i0 - i1) / D};
}

// M_k = D int_0^1 (A + D s)^(nu-1) s^k ds, k = 0, 1, 2.
std::array<double, 3> moments(double A, double D, double nu) {
  if (A == 0.0) {
    const double p = std::pow(D, nu);
    return {p / nu, p / (nu + 1.0), p / (nu + 2.0)};
  }
  const double x = D / A;
  if (x <= 0.5) {
    double b = 1.0, xn = 1.0;
    std::array<double, 3> m{};
    for (int n = 0; n < 200; ++n) {
      const double c = b * xn;
      for (int k = 0; k < 3; ++k) m[k] += c / (n + k + 1.0);
      if (std::abs(c) < 1e-18 * m[0]) break;
      b *= (nu - 1.0 - n) / (n + 1.0);
      xn *= x;
    }
    const double scale = std::pow(A, nu - 1.0) * D;
    for (double& v : m) v *= scale;
    return m;
  }
  // u = A + D s; I_k = int_A^(A+D) u^(nu-1+k) du. A / D < 2 bounds the
  // cancellation in the binomial recombination.
  const double lp = std::log1p(x);
  const double i0 = std::pow(A, nu) * std::expm1(nu * lp) / nu;
  const double i1 = std::pow(A, nu + 1.0) * std::expm1((nu + 1.0) * lp) / (nu + 1.0);
  const double i2 = std::pow(A, nu + 2.0) * std::expm1((nu + 2.0) * lp) / (nu + 2.0);
  return {i0, (i1 - A * i0) / D, (i2 - 2.0 * A * i1 + A * A * i0) / (D * D)};
}

void check_samples(const GradedGrid& grid, const std::vector<double>& samples) {
  if (samples.size() != grid.steps())
    throw_invalid("expected " + std::to_string(grid.steps()) + " samples on t_1..t_n, got " +
                  std::to_string(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (!std::isfinite(samples[i]))
      throw_invalid("sample at node " + std::to_string(i + 1) + " is not finite");
}

// int_0^{t_i} (t_i - xi)^(nu-1) h(xi) dxi for h = c0 xi^q + r, where
// c0 = h(t_1)/t_1^q, so r(t_1) = 0. The power part is integrated exactly; r is
// taken as 0 on [0, t_1] and piecewise linear after.
class ProductRule {
 public:
  ProductRule(const std::vector<double>& nodes, double nu, double q)
      : t_(nodes),
        nu_(nu),
        q_(q),
        beta_(std::exp(std::lgamma(q + 1.0) + std::lgamma(nu) - std::lgamma(q + 1.0 + nu))) {}

  double q() const noexcept { return q_; }
  // int_0^{t_i} (t_i - xi)^(nu-1) xi^q dxi
  double power(std::size_t i) const { return beta_ * std::pow(t_[i], q_ + nu_); }

  // Sum of the linear pieces up to t_i using r(t_1..t_{i-1}), and the weight
  // of r(t_i) in the last piece.
  std::pair<double, double> step(std::size_t i, const std::vector<double>& r) const {
    if (i == 1) return {0.0, 0.0};
    detail::NeumaierSum s;
    const double ti = t_[i];
    double right = 0.0;
    for (std::size_t j = 2; j <= i; ++j) {
      const auto [wl, wr] = linear_piece(ti - t_[j], t_[j] - t_[j - 1], nu_);
      s.add(wl * r[j - 2]);
      if (j < i)
        s.add(wr * r[j - 1]);
      else
        right = wr;
    }
    return {s.value(), right};
  }

  // As step(), with r quadratic through t_{j-2}, t_{j-1}, t_j on each
  // [t_{j-1}, t_j], j >= 3, and linear on [t_1, t_2].
  std::pair<double, double> step_quadratic(std::size_t i, const std::vector<double>& r) const {
    if (i == 1) return {0.0, 0.0};
    detail::NeumaierSum s;
    const double ti = t_[i];
    double right = 0.0;
    {
      const auto [wl, wr] = linear_piece(ti - t_[2], t_[2] - t_[1], nu_);
      s.add(wl * r[0]);
      if (i > 2)
        s.add(wr * r[1]);
      else
        right = wr;
    }
    for (std::size_t j = 3; j <= i; ++j) {
      const double D = t_[j] - t_[j - 1];
      const auto m = moments(ti - t_[j], D, nu_);
      // Lagrange weights in s = (t_j - xi) / D, nodes s = 0, 1, sx
      const double sx = 1.0 + (t_[j - 1] - t_[j - 2]) / D;
      const double w0 = (m[2] - (1.0 + sx) * m[1] + sx * m[0]) / sx;
      const double w1 = (m[2] - sx * m[1]) / (1.0 - sx);
      const double wx = (m[2] - m[1]) / (sx * (sx - 1.0));
      s.add(w1 * r[j - 2]);
      s.add(wx * r[j - 3]);
      if (j < i)
        s.add(w0 * r[j - 1]);
      else
        right = w0;
    }
    return {s.value(), right};
  }

 private:
  const std::vector<double>& t_;
  double nu_;
  double q_;
  double beta_;
};

}  // namespace

std::vector<double> rl_integral_numeric(const GradedGrid& grid, const std::vector<double>& samples,
                                        double sigma, double origin_exponent) {
  if (!(sigma < 0.0)) throw_invalid("fractional integral needs sigma < 0");
  if (!(origin_exponent > -1.0)) throw_invalid("origin exponent must exceed -1");
  check_samples(grid, samples);
  const double nu = -sigma;
  const double inv_gamma = 1.0 / std::tgamma(nu);
  const ProductRule rule(grid.nodes(), nu, origin_exponent);
  const auto& t = grid.nodes();
  const double c0 = samples[0] * std::pow(t[1], -origin_exponent);
  std::vector<double> r(samples.size());
  for (std::size_t i = 1; i < r.size(); ++i)
    r[i] = samples[i] - c0 * std::pow(t[i + 1], origin_exponent);
  std::vector<double> out(grid.steps());
  for (std::size_t i = 1; i <= grid.steps(); ++i) {
    const auto [known, last] = rule.step(i, r);
    out[i - 1] = inv_gamma * (c0 * rule.power(i) + known + last * r[i - 1]);
  }
  return out;
}

std::vector<double> rl_derivative_numeric(const GradedGrid& grid,
                                          const std::vector<double>& samples, double alpha,
                                          double origin_exponent) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw_invalid("derivative order must lie in (0, 1)");
  if (grid.steps() < 8) throw_invalid("grid too coarse for differencing (need n >= 8)");
  // J^(alpha-1) h ~ t^gamma near 0; differencing G = t^-gamma J^(alpha-1) h
  // keeps the stencil error proportional to the smooth part.
  const double gamma = origin_exponent + 1.0 - alpha;
  const auto g = rl_integral_numeric(grid, samples, alpha - 1.0, origin_exponent);
  const auto& t = grid.nodes();
  const std::size_t n = grid.steps();
  std::vector<double> G(n), d(n);
  for (std::size_t i = 1; i <= n; ++i) G[i - 1] = g[i - 1] * std::pow(t[i], -gamma);
  // G[i - 1] lives at t_i
  for (std::size_t i = 2; i < n; ++i) {
    const double h1 = t[i] - t[i - 1], h2 = t[i + 1] - t[i];
    d[i - 1] = -h2 / (h1 * (h1 + h2)) * G[i - 2] + (h2 - h1) / (h1 * h2) * G[i - 1] +
               h1 / (h2 * (h1 + h2)) * G[i];
  }
  {
    const double h1 = t[2] - t[1], h2 = t[3] - t[2];
    d[0] = -(2 * h1 + h2) / (h1 * (h1 + h2)) * G[0] + (h1 + h2) / (h1 * h2) * G[1] -
           h1 / (h2 * (h1 + h2)) * G[2];
  }
  {
    const double h1 = t[n - 1] - t[n - 2], h2 = t[n] - t[n - 1];
    d[n - 1] = h2 / (h1 * (h1 + h2)) * G[n - 3] - (h1 + h2) / (h1 * h2) * G[n - 2] +
               (h1 + 2 * h2) / (h2 * (h1 + h2)) * G[n - 1];
  }
  for (std::size_t i = 1; i <= n; ++i)
    d[i - 1] = std::pow(t[i], gamma) * (d[i - 1] + gamma * G[i - 1] / t[i]);
  return d;
}

namespace {

// Leading power of W = T - phi t^(alpha-1)/Gamma(alpha) near 0.
double leading_exponent(const ProblemParams& p, double phi, double f) {
  double q = INFINITY;
  if (f != 0.0) q = std::min(q, p.alpha + p.mu);
  if (phi != 0.0) q = std::min(q, 2.0 * p.alpha + p.beta - 1.0);
  return std::isfinite(q) ? q : p.alpha + p.mu;
}

}  // namespace

Residual ode_residual(const ProblemParams& params, double lambda_k, double phi_k, double f_k,
                      const GradedGrid& grid, const std::vector<double>& samples) {
  params.validate();
  check_samples(grid, samples);
  const double a = params.alpha, b = params.beta, mu = params.mu;
  const auto t = grid.points();
  // W = T - phi t^(a-1)/Gamma(a) starts with A t^pa (phi != 0) and B t^pb
  // (f != 0); balancing powers in the equation gives
  //   pa = 2a+b-1, A = -lambda phi Gamma(a+b) / (Gamma(a) Gamma(2a+b)),
  //   pb = a+mu,   B = f Gamma(mu+1) / Gamma(a+mu+1).
  // The quadrature fits one power at the origin. When both powers are below
  // 1 the smaller one is removed exactly and the other is fitted; otherwise
  // the leading one is fitted. Removing more costs accuracy at large t,
  // where the subtracted powers grow like lambda while T decays.
  const double lga = std::lgamma(a);
  const double pa = 2 * a + b - 1, pb = a + mu;
  double q = leading_exponent(params, phi_k, f_k);
  double exact_p = 0.0, exact_c = 0.0;  // c t^p removed exactly
  if (phi_k == 0.0 && f_k != 0.0 && a + b + mu < 1.0) {
    // The fitted coefficient absorbs the lambda t^(a+b) correction at t_1,
    // an error of order t^(a+b+mu) at the first nodes. Removing B t^pb
    // exactly pushes it to t^(2(a+b)+mu), provided T(t_1) - B t_1^pb is
    // still resolved in double precision.
    const double B = f_k * std::exp(std::lgamma(mu + 1) - std::lgamma(a + mu + 1));
    const double rest = samples[0] - B * std::pow(t[0], pb);
    if (std::abs(rest) > 1e-8 * std::abs(samples[0])) {
      exact_p = pb;
      exact_c = B;
      q = pb + a + b;
    }
  } else if (phi_k != 0.0 && f_k != 0.0 && pa < 1.0 && pb < 1.0) {
    if (pa <= pb) {
      exact_p = pa;
      exact_c = -lambda_k * phi_k * std::exp(std::lgamma(a + b) - lga - std::lgamma(2 * a + b));
      q = pb;
    } else {
      exact_p = pb;
      exact_c = f_k * std::exp(std::lgamma(mu + 1) - std::lgamma(a + mu + 1));
      q = pa;
    }
  }
  // d^a of c t^p is c Gamma(p+1)/Gamma(p+1-a) t^(p-a)
  const double exact_d =
      exact_c == 0.0 ? 0.0 : exact_c * std::exp(std::lgamma(exact_p + 1) - std::lgamma(exact_p + 1 - a));
  std::vector<double> w = samples;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double lt = std::log(t[i]);
    if (phi_k != 0.0) w[i] -= phi_k * std::exp((a - 1) * lt - lga);
    if (exact_c != 0.0) w[i] -= exact_c * std::exp(exact_p * lt);
  }
  const auto d = rl_derivative_numeric(grid, w, a, q);
  Residual r;
  r.steps = grid.steps();
  r.exponent = grid.exponent();
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    const double exact = exact_d == 0.0 ? 0.0 : exact_d * std::pow(t[i], exact_p - a);
    const double res = d[i] + exact + lambda_k * std::pow(t[i], b) * samples[i] -
                       std::pow(t[i], mu) * f_k;
    if (r.node == 0 || std::abs(res) > r.max_abs) {
      r.max_abs = std::abs(res);
      r.node = i + 1;
      r.t = t[i];
    }
  }
  return r;
}

Residual ode_residual(const ProblemParams& params, double lambda_k, double f_k,
                      const GradedGrid& grid, const std::vector<double>& samples) {
  return ode_residual(params, lambda_k, 0.0, f_k, grid, samples);
}

std::vector<double> timestep_scalar_cauchy(const ProblemParams& params, double lambda_k,
                                           double phi_k, double f_k, const GradedGrid& grid) {
  params.validate();
  if (!(lambda_k >= 0.0) || !std::isfinite(lambda_k))
    throw_invalid("lambda must be nonnegative and finite");
  const double a = params.alpha, b = params.beta, mu = params.mu;
  const std::size_t n = grid.steps();
  // The first step treats s^beta W as a pure power on [0, t_1], off by
  // O((lambda t_1^(alpha+beta))^2), and the early intervals are wide against
  // the lambda t^(alpha+beta) ~ 1 layer. Interval i <= kStart is split into
  // the largest power of two <= kStart/i pieces ([0, t_1] on the grid's own
  // grading), so neighbouring spacings differ by about 2. Only grid nodes are
  // reported.
  constexpr std::size_t kStart = 32;
  const auto& g = grid.nodes();
  std::vector<double> t{0.0};
  std::vector<std::size_t> at(n + 1, 0);  // at[i]: index of t_i in t
  for (std::size_t i = 1; i <= n; ++i) {
    std::size_t pieces = 1;
    while (i <= kStart && 2 * pieces * i <= kStart) pieces *= 2;
    for (std::size_t j = 1; j < pieces; ++j) {
      const double s = static_cast<double>(j) / static_cast<double>(pieces);
      t.push_back(i == 1 ? g[1] * std::pow(s, grid.exponent()) : g[i - 1] + s * (g[i] - g[i - 1]));
    }
    t.push_back(g[i]);
    at[i] = t.size() - 1;
  }
  const std::size_t m = t.size() - 1;

  const double inv_ga = 1.0 / std::tgamma(a);
  // exact J^alpha of the forcing and of s^beta times the leading term
  const double src = f_k * std::exp(std::lgamma(mu + 1.0) - std::lgamma(mu + a + 1.0));
  const double lead = lambda_k * phi_k * inv_ga *
                      std::exp(std::lgamma(a + b) - std::lgamma(2.0 * a + b));

  // g = s^beta W is marched; its leading power fixes the subtracted term
  const double q = b + leading_exponent(params, phi_k, f_k);
  const ProductRule rule(t, a, q);
  const double k = lambda_k * inv_ga;
  std::vector<double> r(m), out(n), r_full(m + 1);  // r_full[i]: W at t[i]
  double c0 = 0.0;
  for (std::size_t i = 1; i <= m; ++i) {
    const double ti = t[i];
    double rhs = 0.0;
    if (src != 0.0) rhs += src * std::pow(ti, mu + a);
    if (lead != 0.0) rhs -= lead * std::pow(ti, 2.0 * a + b - 1.0);
    const double tb = std::pow(ti, b);
    double w;
    if (i == 1) {
      // J^alpha g(t_1) = c0 power(1)/Gamma(alpha), c0 = t_1^(beta-q) W_1
      w = rhs / (1.0 + k * rule.power(1) * std::pow(ti, b - q));
      c0 = tb * w * std::pow(ti, -q);
    } else {
      // g_i = tb W_i enters through r_i = g_i - c0 t_i^q
      const auto [known, last] = rule.step_quadratic(i, r);
      const double tq = std::pow(ti, q);
      w = (rhs - k * (c0 * rule.power(i) + known - last * c0 * tq)) / (1.0 + k * last * tb);
      r[i - 1] = tb * w - c0 * tq;
    }
    if (!std::isfinite(w)) {
      const auto node = std::lower_bound(at.begin() + 1, at.end(), i) - at.begin();
      throw Error(ErrorKind::solver,
                  "time stepper produced a non-finite value at node " + std::to_string(node));
    }
    r_full[i] = w;
  }
  for (std::size_t i = 1; i <= n; ++i) {
    const double ti = g[i];
    out[i - 1] = r_full[at[i]] + (phi_k != 0.0 ? phi_k * inv_ga * std::pow(ti, a - 1.0) : 0.0);
  }
  return out;
}

double highprec_series_eval(const mlf::KilbasSaigoParams& p, double z, int digits) {
  p.validate();
  if (digits < 30) throw_invalid("high-precision reference needs digits >= 30");
  if (!std::isfinite(z)) throw_invalid("argument must be finite");
  if (z == 0.0) return 1.0;

  // Largest term, located in double log space, sets the guard bits.
  const double lz = std::log(std::abs(z));
  double logc = 0.0, peak = 0.0;
  std::size_t k_peak = 0;
  constexpr std::size_t kMaxTerms = 2000000;
  for (std::size_t k = 0; k < kMaxTerms; ++k) {
    const double lt = logc + static_cast<double>(k) * lz;
    if (lt > peak) {
      peak = lt;
      k_peak = k;
    }
    if (k > k_peak + 4 && lt < peak - 50.0) break;
    const double g = p.alpha * (static_cast<double>(k) * p.m + p.l) + 1.0;
    logc += std::lgamma(g) - std::lgamma(g + p.alpha);
  }
  const double target_bits = digits * std::log2(10.0);
  const auto bits = static_cast<mpfr_prec_t>(target_bits + peak / std::log(2.0) + 64.0);

  using detail::Mpfr;
  Mpfr sum(bits, 1.0), term(bits, 1.0), zz(bits, z), arg(bits), lg(bits), ratio(bits), eps(bits);
  mpfr_set_ui_2exp(eps.get(), 1, -static_cast<long>(target_bits) - 8, MPFR_RNDN);
  int small = 0;
  for (std::size_t k = 0; k < kMaxTerms; ++k) {
    // ratio = Gamma(arg) / Gamma(arg + alpha), arg = alpha (k m + l) + 1
    mpfr_set_d(arg.get(), p.m, MPFR_RNDN);
    mpfr_mul_ui(arg.get(), arg.get(), static_cast<unsigned long>(k), MPFR_RNDN);
    mpfr_add_d(arg.get(), arg.get(), p.l, MPFR_RNDN);
    mpfr_mul_d(arg.get(), arg.get(), p.alpha, MPFR_RNDN);
    mpfr_add_ui(arg.get(), arg.get(), 1, MPFR_RNDN);
    mpfr_lngamma(ratio.get(), arg.get(), MPFR_RNDN);
    mpfr_add_d(arg.get(), arg.get(), p.alpha, MPFR_RNDN);
    mpfr_lngamma(lg.get(), arg.get(), MPFR_RNDN);
    mpfr_sub(ratio.get(), ratio.get(), lg.get(), MPFR_RNDN);
    mpfr_exp(ratio.get(), ratio.get(), MPFR_RNDN);
    mpfr_mul(term.get(), term.get(), ratio.get(), MPFR_RNDN);
    mpfr_mul(term.get(), term.get(), zz.get(), MPFR_RNDN);
    mpfr_add(sum.get(), sum.get(), term.get(), MPFR_RNDN);
    if (k > k_peak) {
      mpfr_mul(lg.get(), sum.get(), eps.get(), MPFR_RNDN);
      small = mpfr_cmpabs(term.get(), lg.get()) < 0 ? small + 1 : 0;
      if (small == 3) return sum.to_double();
    }
  }
  throw Error(ErrorKind::evaluation_failure,
              "high-precision series did not converge at z = " + std::to_string(z));
}

}  // namespace subdiff::oracle
