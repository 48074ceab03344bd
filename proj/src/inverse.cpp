#include "subdiff/inverse.hpp"

#include <cmath>
#include <string>

#include "detail/parallel.hpp"
#include "subdiff/error.hpp"

namespace subdiff {

namespace {

// S_k(T) with its positivity certificate.
double certified_source_response(const ModeKernel& K, double lambda, std::size_t k) {
  const ProblemParams& p = K.params();
  const double x = lambda * std::pow(p.T, p.alpha + p.beta);
  const double lower = mlf::bounds_prop2(p.source_index(), x).first;
  if (!(lower > 0.0))
    throw Error(ErrorKind::conditioning,
                "lower envelope of the source response is not positive", k);
  double s;
  try {
    s = K.source(lambda, p.T);
  } catch (const Error& e) {
    throw e.with_mode(k);
  }
  if (!(s > 0.0) || !std::isfinite(1.0 / s))
    throw Error(ErrorKind::conditioning, "source response at T is numerically zero", k);
  return s;
}

}  // namespace

CoeffSeq reconstruct_f(const ProblemParams& params, const SpectralOperator& op,
                       const CoeffSeq& phi, const CoeffSeq& psi, mlf::EvalOptions opts) {
  params.validate();
  require_length(op, phi, "phi");
  require_length(op, psi, "psi");
  const ModeKernel K(params, opts);
  CoeffSeq f(op.mode_count());
  detail::parallel_for(f.size(), [&](std::size_t i) {
    const double lambda = op.eigenvalues()[i];
    const double s = certified_source_response(K, lambda, i + 1);
    double num = psi[i];
    if (phi[i] != 0.0) {
      try {
        num -= phi[i] * K.homogeneous(lambda, params.T);
      } catch (const Error& e) {
        throw e.with_mode(i + 1);
      }
    }
    f[i] = num / s;
  });
  return f;
}

InverseSolution solve_inverse(const ProblemParams& params, const SpectralOperator& op,
                              const CoeffSeq& phi, const CoeffSeq& psi, mlf::EvalOptions opts) {
  CoeffSeq f = reconstruct_f(params, op, phi, psi, opts);
  double total = 0.0, upper = 0.0;
  const std::size_t n = op.mode_count();
  for (std::size_t i = 0; i < n; ++i) {
    const double w = op.eigenvalues()[i] * psi[i];
    total += w * w;
    if (2 * i >= n) upper += w * w;
  }
  SolutionField u(params, op, phi, f, opts);
  return {std::move(u), std::move(f), total > 0.0 ? upper / total : 0.0};
}

ConditioningReport conditioning_report(const ProblemParams& params, const SpectralOperator& op,
                                       mlf::EvalOptions opts) {
  params.validate();
  const ModeKernel K(params, opts);
  const std::size_t n = op.mode_count();
  const double tr = std::pow(params.T, params.alpha + params.beta);
  // 1 / (gain T^(alpha+mu))
  const double head = 1.0 / (K.source_gain() * std::pow(params.T, params.alpha + params.mu));
  const auto idx = params.source_index();

  ConditioningReport r;
  r.amplification.resize(n);
  r.lower.resize(n);
  r.upper.resize(n);
  detail::parallel_for(n, [&](std::size_t i) {
    const double lambda = op.eigenvalues()[i];
    r.amplification[i] = 1.0 / certified_source_response(K, lambda, i + 1);
    const auto [lo, up] = mlf::bounds_prop2(idx, lambda * tr);
    r.lower[i] = head / up;
    r.upper[i] = head / lo;
  });
  // head (1 + g_lo lambda T^rho) <= head (1/lambda_1 + g_lo T^rho) lambda
  const double g_lo = (1.0 / mlf::bounds_prop2(idx, 1.0).first) - 1.0;
  r.growth_constant = head * (1.0 / op.eigenvalues().front() + g_lo * tr);
  return r;
}

}  // namespace subdiff
