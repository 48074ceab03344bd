#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "subdiff/error.hpp"
#include "subdiff/kilbas_saigo.hpp"

using namespace subdiff::mlf;

namespace {

// Plain two-parameter series in long double; only used where it does not
// cancel (|z| small).
double two_param_series(double alpha, double beta, double z) {
  long double sum = 0.0L;
  long double zk = 1.0L;
  for (int k = 0; k < 400; ++k) {
    sum += zk / std::tgamma(static_cast<long double>(alpha) * k + beta);
    zk *= z;
  }
  return static_cast<double>(sum);
}

EvalOptions strict() {
  EvalOptions o;
  o.enforce_bounds = true;
  return o;
}

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(KilbasSaigoParams({1.5, 1.0, 1.0}).validate(), subdiff::Error);
  CHECK_THROWS_AS(KilbasSaigoParams({0.0, 1.0, 1.0}).validate(), subdiff::Error);
  CHECK_THROWS_AS(KilbasSaigoParams({0.5, 0.0, 1.0}).validate(), subdiff::Error);
  CHECK_THROWS_AS(KilbasSaigoParams({0.5, 1.0, -2.0}).validate(), subdiff::Error);
  CHECK_NOTHROW(KilbasSaigoParams({0.5, 1.0, -1.99}).validate());
  try {
    coefficients({1.5, 1.0, 1.0}, 3);
    FAIL("expected throw");
  } catch (const subdiff::Error& e) {
    CHECK(e.kind() == subdiff::ErrorKind::invalid_params);
  }
}

TEST_CASE("coefficients") {
  SUBCASE("n = 0") {
    const auto c = coefficients({0.37, 2.5, 0.4}, 0);
    REQUIRE(c.size() == 1);
    CHECK(c[0] == 1.0);
  }
  SUBCASE("single factor") {
    const KilbasSaigoParams p{0.37, 2.5, 0.4};
    const auto c = coefficients(p, 1);
    const double ref =
        std::tgamma(p.alpha * p.l + 1) / std::tgamma(p.alpha * (p.l + 1) + 1);
    CHECK(c[1] == doctest::Approx(ref).epsilon(1e-14));
  }
  SUBCASE("m = 1 telescopes") {
    const auto c = coefficients({0.5, 1.0, 1.0}, 5);
    for (int k = 0; k <= 5; ++k) {
      const double ref = std::exp(std::lgamma(1.5) - std::lgamma(0.5 * k + 1.5));
      CHECK(c[k] == doctest::Approx(ref).epsilon(1e-14));
    }
  }
  SUBCASE("positive, with ratio tending to zero") {
    const auto lc = log_coefficients({0.3, 0.7, -1.0}, 4000);
    for (std::size_t k = 1; k < lc.size(); ++k) CHECK(std::isfinite(lc[k]));
    // c_{k+1}/c_k ~ (alpha m k)^{-alpha}
    CHECK(std::exp(lc[4000] - lc[3999]) ==
          doctest::Approx(std::pow(0.3 * 0.7 * 3999, -0.3)).epsilon(1e-2));
    // ratios decrease monotonically once past the first few indices
    for (std::size_t k = 10; k + 1 < lc.size(); ++k)
      CHECK(lc[k + 1] - lc[k] <= lc[k] - lc[k - 1] + 1e-14);
  }
}

TEST_CASE("eval at the origin is exactly one") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ad(0.05, 0.95), md(0.1, 6.0), ud(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const double a = ad(rng);
    const KilbasSaigoParams p{a, md(rng), -1.0 / a + 0.01 + 6.0 * ud(rng)};
    const auto r = eval(p, 0.0);
    CHECK(r.value == 1.0);
    CHECK(r.terms_used >= 1);
  }
}

TEST_CASE("m = 1 reduces to the two-parameter function") {
  const auto r = eval({0.5, 1.0, 1.0}, -1.0);
  const double ref = std::tgamma(1.5) * two_param_series(0.5, 1.5, -1.0);
  CHECK(r.value == doctest::Approx(ref).epsilon(1e-14));
  CHECK(r.precision_mode == PrecisionMode::standard);
  CHECK(r.bound_check == BoundCheck::within);
}

TEST_CASE("two-sided envelope example") {
  const KilbasSaigoParams p{0.5, 2.0, 2.0};
  const auto r = eval(p, -1.0, strict());
  const double lo = 1.0 / (1.0 + std::tgamma(1.0) / std::tgamma(1.5));
  const double up = 1.0 / (1.0 + std::tgamma(2.0) / std::tgamma(2.5));
  CHECK(r.value >= lo);
  CHECK(r.value <= up);
  const auto [blo, bup] = bounds_prop2(p, 1.0);
  CHECK(blo == doctest::Approx(lo).epsilon(1e-15));
  CHECK(bup == doctest::Approx(up).epsilon(1e-15));
  CHECK(r.bound_check == BoundCheck::within);
}

TEST_CASE("upper bound for l = m - 1/alpha") {
  const KilbasSaigoParams p{0.5, 2.0, 0.0};
  CHECK(upper_bound_prop1(p, 0.0) == 1.0);
  double prev = 1.0;
  for (double t = 0.01; t < 1e4; t *= 1.7) {
    const double u = upper_bound_prop1(p, t);
    CHECK(u < prev);
    prev = u;
  }
  const KilbasSaigoFunction f(p, strict());
  for (double t = 0.0; t <= 100.0; t += 2.5) {
    CHECK(f(-t) <= upper_bound_prop1(p, t) + 1e-12);
  }
  CHECK_THROWS_AS(upper_bound_prop1({0.5, 2.0, 0.5}, 1.0), subdiff::Error);
  CHECK_THROWS_AS(upper_bound_prop1(p, -1.0), subdiff::Error);
}

TEST_CASE("two-sided bound properties") {
  const KilbasSaigoParams p{0.4, 1.5, 0.3};
  const auto [lo0, up0] = bounds_prop2(p, 0.0);
  CHECK(lo0 == 1.0);
  CHECK(up0 == 1.0);
  const KilbasSaigoFunction f(p, strict());
  for (double t = 1e-3; t < 1e3; t *= 1.4) {
    const auto [lo, up] = bounds_prop2(p, t);
    CHECK(lo > 0.0);
    CHECK(lo <= up);
    const double v = f(-t);
    CHECK(v >= lo - 1e-12);
    CHECK(v <= up + 1e-12);
  }
  CHECK(bounds_prop2(p, 1e300).first > 0.0);
  CHECK_THROWS_AS(bounds_prop2({0.5, 2.0, 0.0}, 1.0), subdiff::Error);
  CHECK_THROWS_AS(bounds_prop2({0.5, 2.0, -0.5}, 1.0), subdiff::Error);
}

TEST_CASE("envelope classification") {
  CHECK(envelope_for({0.5, 2.0, 0.0}) == Envelope::upper_only);
  CHECK(envelope_for({0.3, 1.0 + 0.2 / 0.3, 1.0 + (0.2 - 1.0) / 0.3}) == Envelope::upper_only);
  CHECK(envelope_for({0.5, 2.0, 0.1}) == Envelope::sandwich);
  CHECK(envelope_for({0.5, 2.0, -0.1}) == Envelope::none);
  CHECK(eval({0.5, 2.0, -0.1}, -3.0).bound_check == BoundCheck::not_applicable);
  CHECK(eval({0.5, 2.0, 1.0}, 2.0).bound_check == BoundCheck::not_applicable);
}

TEST_CASE("two_param_ml") {
  CHECK(two_param_ml(0.7, 1.3, 0.0) == doctest::Approx(1.0 / std::tgamma(1.3)).epsilon(1e-15));
  for (double z : {-20.0, -7.5, -1.0, -0.1, 0.3, 2.0, 10.0})
    CHECK(two_param_ml(1.0, 1.0, z) == doctest::Approx(std::exp(z)).epsilon(1e-13));
  // E_{1/2,1}(-x) = exp(x^2) erfc(x)
  for (double x : {0.5, 2.0, 6.0, 20.0})
    CHECK(two_param_ml(0.5, 1.0, -x) ==
          doctest::Approx(std::exp(x * x) * std::erfc(x)).epsilon(1e-12));
  CHECK_THROWS_AS(two_param_ml(0.0, 1.0, 1.0), subdiff::Error);
  CHECK_THROWS_AS(two_param_ml(0.5, -1.0, 1.0), subdiff::Error);
}

TEST_CASE("telescoping identity for m = 1") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ad(0.05, 0.95), ud(0.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    const double a = ad(rng);
    const double l = -1.0 / a + 0.1 + (5.0 + 1.0 / a - 0.1) * ud(rng);
    const KilbasSaigoFunction f({a, 1.0, l});
    for (int j = 0; j < 4; ++j) {
      const double z = -10.0 * ud(rng);
      const double ref = std::tgamma(a * l + 1.0) * two_param_ml(a, a * l + 1.0, z);
      CHECK(std::abs(f(z) - ref) <= 1e-12 * std::abs(ref));
    }
  }
}

TEST_CASE("interpolated coefficients") {
  const KilbasSaigoParams p{0.45, 1.7, -0.9};
  const KilbasSaigoFunction f(p);
  const auto lc = log_coefficients(p, 12);
  for (int k = 0; k <= 12; ++k)
    CHECK(std::exp(f.log_coefficient({double(k), 0.0})).real() ==
          doctest::Approx(std::exp(lc[k])).epsilon(1e-13));
  // c(u+1) = c(u) Gamma(a u + b) / Gamma(a u + b + alpha) off the integers
  const subdiff::LogGammaRatio g(p.alpha);
  for (std::complex<double> u : {std::complex<double>{0.3, 2.0}, {-0.6, -7.0}, {2.5, 25.0}}) {
    const auto lhs = std::exp(f.log_coefficient(u + 1.0) - f.log_coefficient(u));
    const auto rhs = std::exp(g(p.alpha * (u * p.m + p.l) + 1.0));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs));
  }
}

TEST_CASE("routes agree in the cancellation regime") {
  struct Case {
    KilbasSaigoParams p;
    double z;
  };
  const Case cases[] = {
      {{0.8, 2.0, 2.0}, -50.0}, {{0.8, 2.0, 2.0}, -12.0}, {{0.5, 1.5, 0.7}, -8.0},
      {{0.6, 0.8, 0.8 - 1 / 0.6}, -15.0}, {{0.3, 3.0, 0.0}, -4.0},
      {{0.5, 1.0, -1.5}, -4.0},  // sign-changing (l < m - 1/alpha)
  };
  for (const auto& c : cases) {
    EvalOptions ext;
    ext.method = Method::extended;
    EvalOptions con;
    con.method = Method::contour;
    const auto re = eval(c.p, c.z, ext);
    const auto rc = eval(c.p, c.z, con);
    const auto ra = eval(c.p, c.z);
    CHECK(re.precision_mode == PrecisionMode::extended);
    CHECK(rc.precision_mode == PrecisionMode::contour);
    CHECK(std::abs(re.value - rc.value) <= 1e-12 * std::abs(re.value));
    CHECK(ra.value == rc.value);  // automatic picks the contour here
    CHECK(ra.precision_mode == PrecisionMode::contour);
    // with the contour disabled the automatic route retries in extended precision
    EvalOptions no_contour;
    no_contour.allow_contour = false;
    const auto rx = eval(c.p, c.z, no_contour);
    CHECK(rx.precision_mode == PrecisionMode::extended);
    CHECK(rx.value == re.value);
  }
}

TEST_CASE("standard and extended agree where the series is benign") {
  for (double z : {-0.9, -0.3, 0.4, 1.5}) {
    EvalOptions ext;
    ext.method = Method::extended;
    const KilbasSaigoParams p{0.65, 1.2, 0.4};
    const auto rs = eval(p, z);
    CHECK(rs.precision_mode == PrecisionMode::standard);
    CHECK(rs.value == doctest::Approx(eval(p, z, ext).value).epsilon(1e-14));
  }
}

TEST_CASE("positivity and envelope over random indices") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ad(0.1, 0.95), md(0.2, 5.0), ud(0.0, 1.0);
  for (int i = 0; i < 30; ++i) {
    const double a = ad(rng);
    const double m = md(rng);
    const double l = m - 1.0 / a + 0.05 + 3.0 * ud(rng);
    const KilbasSaigoFunction f({a, m, l}, strict());
    for (double t = 0.0; t <= 200.0; t = 1.6 * t + 0.05) {
      const auto r = f.eval(-t);
      CHECK(r.value > 0.0);
      CHECK(r.value <= 1.0);
      CHECK(r.bound_check == BoundCheck::within);
    }
  }
}

TEST_CASE("standard series reports nonconvergence") {
  EvalOptions o;
  o.method = Method::series;
  CHECK_THROWS_AS(eval({0.3, 1.0, 1.0}, -30.0, o), subdiff::Error);
  o.max_terms = 5;
  CHECK_THROWS_AS(eval({0.5, 1.0, 1.0}, 0.5, o), subdiff::Error);
}

TEST_CASE("positive arguments") {
  // E_{alpha,1,l}(z) = Gamma(alpha l + 1) E_{alpha, alpha l + 1}(z)
  const double v = eval({0.5, 1.0, 1.0}, 3.0).value;
  CHECK(v == doctest::Approx(std::tgamma(1.5) * two_param_ml(0.5, 1.5, 3.0)).epsilon(1e-13));
  CHECK_THROWS_AS(eval({0.5, 1.0, 1.0}, 1e6), subdiff::Error);
}

TEST_CASE("algebraic tail keeps its relative accuracy") {
  // For l = m - 1/alpha, E(-t) t^(1+1/m) tends to a constant, with
  // corrections that shrink at least like 1/t.
  for (auto [a, m] : {std::pair{0.3, 0.5}, {0.5, 2.0}, {0.909, 0.36}}) {
    const KilbasSaigoFunction f({a, m, m - 1.0 / a}, strict());
    const double p = 1.0 + 1.0 / m;
    double prev_r = 0.0;
    double prev_d = INFINITY;
    for (double t = 1e3; t <= 1e9; t *= 10.0) {
      const double r = f(-t) * std::pow(t, p);
      if (prev_r != 0.0) {
        const double d = std::abs(r - prev_r) / r;
        CHECK(d < prev_d);
        prev_d = d;
      }
      prev_r = r;
    }
    CHECK(prev_d < 1e-6);
  }
}
