#include <cmath>
#include <random>

#include "doctest.h"
#include "subdiff/error.hpp"
#include "subdiff/inverse.hpp"

using namespace subdiff;

namespace {

struct Data {
  ProblemParams p;
  CoeffSeq phi, f;
};

Data random_problem(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double a = 0.1 + 0.85 * u(rng);
  Data d{{a, -a + 0.05 + 2.0 * u(rng), -0.9 + 2.5 * u(rng), 0.5 + 1.5 * u(rng)}, {}, {}};
  for (std::size_t k = 1; k <= n; ++k) {
    const double decay = std::pow(double(k), -3.0);
    d.phi.push_back((u(rng) < 0.5 ? -1 : 1) * (0.1 + 0.9 * u(rng)) * decay);
    d.f.push_back((u(rng) < 0.5 ? -1 : 1) * (0.1 + 0.9 * u(rng)) * decay);
  }
  return d;
}

}  // namespace

TEST_CASE("round trip through the forward solve") {
  std::mt19937_64 rng(31);
  const auto op = make_dirichlet_laplacian_1d(24, 96);
  for (int rep = 0; rep < 8; ++rep) {
    const Data d = random_problem(rng, 24);
    const auto psi = solve_forward(d.p, op, d.phi, d.f).coefficients(d.p.T);
    const auto f = reconstruct_f(d.p, op, d.phi, psi);
    for (std::size_t k = 0; k < 24; ++k)
      CHECK(std::abs(f[k] - d.f[k]) <= 1e-10 * std::abs(d.f[k]));

    // phi = 0 reduces to the bare source response
    const CoeffSeq zero(24, 0.0);
    const auto psi0 = solve_forward(d.p, op, zero, d.f).coefficients(d.p.T);
    const auto f0 = reconstruct_f(d.p, op, zero, psi0);
    const mlf::KilbasSaigoFunction e2(d.p.source_index());
    for (std::size_t k = 0; k < 24; ++k) {
      const double lambda = op.eigenvalues()[k];
      const double expect = psi0[k] * std::tgamma(d.p.mu + d.p.alpha + 1) /
                            (std::tgamma(d.p.mu + 1) * std::pow(d.p.T, d.p.alpha + d.p.mu) *
                             e2(-lambda * std::pow(d.p.T, d.p.alpha + d.p.beta)));
      CHECK(f0[k] == doctest::Approx(expect).epsilon(1e-13));
    }

    // f = 0 data reconstructs to zero
    const auto psih = solve_forward(d.p, op, d.phi, zero).coefficients(d.p.T);
    for (double v : reconstruct_f(d.p, op, d.phi, psih)) CHECK(std::abs(v) <= 1e-12);
  }
}

TEST_CASE("identity at the final time") {
  std::mt19937_64 rng(5);
  const auto op = make_dirichlet_laplacian_1d(16, 64);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 6; ++rep) {
    const Data d = random_problem(rng, 16);
    CoeffSeq psi(16);
    for (auto& v : psi) v = nd(rng);
    const auto sol = solve_inverse(d.p, op, d.phi, psi);
    const auto uT = sol.u.coefficients(d.p.T);
    for (std::size_t k = 0; k < 16; ++k)
      CHECK(std::abs(uT[k] - psi[k]) <= 1e-10 * std::max(1.0, std::abs(psi[k])));
    CHECK(sol.psi_domain_tail > 0.0);

    // The index E_{alpha, m, beta/alpha} in the numerator does not give back
    // Psi at T unless alpha = 1.
    const mlf::KilbasSaigoFunction wrong({d.p.alpha, d.p.m(), d.p.beta / d.p.alpha});
    const ModeKernel K(d.p);
    double worst = 0.0;
    for (std::size_t k = 0; k < 16; ++k) {
      const double lambda = op.eigenvalues()[k];
      const double x = lambda * std::pow(d.p.T, d.p.alpha + d.p.beta);
      const double h = std::pow(d.p.T, d.p.alpha - 1) / std::tgamma(d.p.alpha) * wrong(-x);
      const double f = (psi[k] - d.phi[k] * h) / K.source(lambda, d.p.T);
      const double back = K(lambda, d.phi[k], f, d.p.T);
      worst = std::max(worst, std::abs(back - psi[k]) / std::max(1.0, std::abs(psi[k])));
    }
    CHECK(worst > 1e-6);
  }
}

TEST_CASE("trivial and linear cases") {
  const ProblemParams p{0.7, 0.3, 0.4, 1.5};
  const auto op = make_dirichlet_laplacian_1d(6, 24);
  const CoeffSeq zero(6, 0.0);
  const auto sol = solve_inverse(p, op, zero, zero);
  for (double v : sol.f) CHECK(v == 0.0);
  for (double v : sol.u.coefficients(0.5)) CHECK(v == 0.0);
  CHECK(sol.psi_domain_tail == 0.0);

  CoeffSeq psi(6, 0.0);
  psi[3] = 0.8;
  const auto f = reconstruct_f(p, op, zero, psi);
  for (std::size_t k = 0; k < 6; ++k) CHECK((f[k] != 0.0) == (k == 3));

  CoeffSeq psi2 = psi;
  for (auto& v : psi2) v *= 2.0;
  const auto f2 = reconstruct_f(p, op, zero, psi2);
  for (std::size_t k = 0; k < 6; ++k) CHECK(f2[k] == 2.0 * f[k]);
}

TEST_CASE("mode diagonality and noise amplification") {
  const ProblemParams p{0.5, 0.2, 0.0, 1.0};
  const auto op = make_dirichlet_laplacian_1d(12, 48);
  const CoeffSeq phi(12, 0.3);
  CoeffSeq psi(12, 0.1);
  const auto base = reconstruct_f(p, op, phi, psi);
  const auto cond = conditioning_report(p, op);
  const double eps = 1e-3;
  double prev_change = 0.0;
  for (std::size_t j = 0; j < 12; ++j) {
    CoeffSeq q = psi;
    q[j] *= 1.0 + eps;
    const auto g = reconstruct_f(p, op, phi, q);
    for (std::size_t k = 0; k < 12; ++k) {
      if (k != j) CHECK(g[k] == base[k]);
    }
    const double change = g[j] - base[j];
    CHECK(change == doctest::Approx(eps * psi[j] * cond.amplification[j]).epsilon(1e-8));
    CHECK(change > prev_change);
    prev_change = change;
  }
}

TEST_CASE("conditioning report") {
  const auto op = make_dirichlet_laplacian_1d(32, 128);
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 6; ++rep) {
    const ProblemParams p = random_problem(rng, 1).p;
    const auto r = conditioning_report(p, op);
    REQUIRE(r.amplification.size() == 32);
    for (std::size_t k = 0; k < 32; ++k) {
      CHECK(r.amplification[k] > 0.0);
      if (k > 0) CHECK(r.amplification[k] >= r.amplification[k - 1]);
      CHECK(r.lower[k] <= r.amplification[k] * (1 + 1e-12));
      CHECK(r.amplification[k] <= r.upper[k] * (1 + 1e-12));
      CHECK(r.upper[k] <= r.growth_constant * op.eigenvalues()[k] * (1 + 1e-12));
    }
  }
  const auto single = conditioning_report({0.5, 0.0, 0.0, 1.0}, SpectralOperator({2.0}));
  CHECK(single.amplification.size() == 1);
}

TEST_CASE("errors") {
  const auto op = make_dirichlet_laplacian_1d(4, 16);
  CHECK_THROWS_AS(reconstruct_f({0.5, 0.0, -1.0, 1.0}, op, CoeffSeq(4), CoeffSeq(4)), Error);
  CHECK_THROWS_AS(reconstruct_f({0.5, 0.0, 0.0, 1.0}, op, CoeffSeq(3), CoeffSeq(4)), Error);
  // a source response that underflows cannot be divided by
  const SpectralOperator huge({1e300});
  try {
    reconstruct_f({0.5, 0.5, 30.0, 1e-12}, huge, CoeffSeq(1, 0.0), CoeffSeq(1, 1.0));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::conditioning);
    CHECK(e.mode() == 1);
  }
}
