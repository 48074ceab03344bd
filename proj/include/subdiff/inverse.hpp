#pragma once

#include <vector>

#include "subdiff/forward.hpp"

namespace subdiff {

/// f_k = (Psi_k - phi_k H_k(T)) / S_k(T), where H_k and S_k are the mode
/// responses to phi = 1 and f = 1. S_k(T) > 0 is certified through the
/// lower envelope of E_{alpha, m, l2} before dividing; failure raises a
/// conditioning error carrying the mode index.
CoeffSeq reconstruct_f(const ProblemParams& params, const SpectralOperator& op,
                       const CoeffSeq& phi, const CoeffSeq& psi, mlf::EvalOptions opts = {});

struct InverseSolution {
  SolutionField u;
  CoeffSeq f;
  /// Share of sum lambda_k^2 Psi_k^2 carried by the upper half of the modes.
  /// Close to 1 suggests Psi is not resolved as D(A) data; advisory only.
  double psi_domain_tail = 0.0;
};

InverseSolution solve_inverse(const ProblemParams& params, const SpectralOperator& op,
                              const CoeffSeq& phi, const CoeffSeq& psi,
                              mlf::EvalOptions opts = {});

/// |d f_k / d Psi_k| = 1/S_k(T) and its envelope from the two-sided bounds,
///   lower_k <= amplification_k <= upper_k <= growth_constant * lambda_k.
struct ConditioningReport {
  std::vector<double> amplification;
  std::vector<double> lower;
  std::vector<double> upper;
  double growth_constant = 0.0;
};

ConditioningReport conditioning_report(const ProblemParams& params, const SpectralOperator& op,
                                       mlf::EvalOptions opts = {});

}  // namespace subdiff
