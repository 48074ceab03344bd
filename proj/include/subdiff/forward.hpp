#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "subdiff/kilbas_saigo.hpp"
#include "subdiff/spectral.hpp"

namespace subdiff {

/// Both Kilbas-Saigo functions of one parameter set, shared by all modes.
///
///   T(t) = phi t^(alpha-1)/Gamma(alpha) E1(-lambda t^(alpha+beta))
///        + f Gamma(mu+1)/Gamma(mu+alpha+1) t^(alpha+mu) E2(-lambda t^(alpha+beta))
///
/// with E1 = E_{alpha, m, l1} and E2 = E_{alpha, m, l2}.
class ModeKernel {
 public:
  explicit ModeKernel(const ProblemParams& p, mlf::EvalOptions opts = {});

  const ProblemParams& params() const noexcept { return p_; }
  const mlf::KilbasSaigoFunction& e1() const noexcept { return e1_; }
  const mlf::KilbasSaigoFunction& e2() const noexcept { return e2_; }

  /// Response to phi = 1, f = 0.
  double homogeneous(double lambda, double t) const;
  /// Response to phi = 0, f = 1.
  double source(double lambda, double t) const;
  double operator()(double lambda, double phi, double f, double t) const;

  /// Gamma(mu+1)/Gamma(mu+alpha+1).
  double source_gain() const noexcept { return source_gain_; }

 private:
  ProblemParams p_;
  mlf::KilbasSaigoFunction e1_;
  mlf::KilbasSaigoFunction e2_;
  double log_gamma_alpha_;
  double source_gain_;
};

/// T_k(t) for one mode; t > 0, lambda > 0.
double mode_solution(const ProblemParams& params, double lambda_k, double phi_k, double f_k,
                     double t);

/// u(t) = sum_k T_k(t) v_k. Mode values are memoized per (k, t); the cache
/// is internally synchronized, so a field may be shared between threads.
class SolutionField {
 public:
  SolutionField(ProblemParams params, SpectralOperator op, CoeffSeq phi, CoeffSeq f,
                mlf::EvalOptions opts = {});
  SolutionField(SolutionField&&) noexcept;
  SolutionField& operator=(SolutionField&&) noexcept;
  ~SolutionField();

  const ProblemParams& params() const noexcept { return kernel_.params(); }
  const SpectralOperator& op() const noexcept { return op_; }
  const CoeffSeq& phi() const noexcept { return phi_; }
  const CoeffSeq& f() const noexcept { return f_; }
  const ModeKernel& kernel() const noexcept { return kernel_; }

  /// T_k(t), k 1-based. Errors carry the mode index.
  double mode(std::size_t k, double t) const;
  /// T_1(t) .. T_N(t), evaluated in parallel.
  CoeffSeq coefficients(double t) const;
  /// u(x, t) at each x, summed in ascending k.
  std::vector<double> evaluate(const std::vector<double>& xs, double t) const;

  std::size_t cache_size() const;

 private:
  struct Cache;

  ModeKernel kernel_;
  SpectralOperator op_;
  CoeffSeq phi_;
  CoeffSeq f_;
  std::unique_ptr<Cache> cache_;
};

SolutionField solve_forward(const ProblemParams& params, const SpectralOperator& op,
                            const CoeffSeq& phi, const CoeffSeq& f, mlf::EvalOptions opts = {});

/// Upper bound on (sum_{k>n} T_k(t)^2)^(1/2), from the envelope of each term:
///   |T_k| <= |phi_k| t^(alpha-1)/Gamma(alpha) U1(lambda_k t^(alpha+beta))
///          + |f_k| gain t^(alpha+mu) U2(lambda_k t^(alpha+beta)).
double tail_bound(const ProblemParams& params, const SpectralOperator& op, const CoeffSeq& phi,
                  const CoeffSeq& f, std::size_t n, double t);

/// J^(alpha-1) T_k(t), summed term by term; tends to phi_k as t -> 0+.
double initial_limit(const ProblemParams& params, double lambda_k, double phi_k, double f_k,
                     double t);

}  // namespace subdiff
