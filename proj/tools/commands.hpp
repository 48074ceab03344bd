#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "problem.hpp"
#include "table.hpp"

namespace subdiff::cli {

struct Outcome {
  std::vector<Table> tables;
  std::vector<std::string> failures;  // one line each, reported on stderr
  bool ok() const { return failures.empty(); }
};

struct MlfArgs {
  double alpha = 0.0;
  double m = 0.0;
  double l = 0.0;
  std::vector<double> z;
  std::string method = "auto";  // auto | series | extended | contour
};

/// Table "mlf": z, value, terms_used, precision_mode, bound_check,
/// lower_bound, upper_bound. Bound cells are empty where no envelope applies.
Outcome cmd_mlf(const MlfArgs& args);

/// Tables "coefficients" (t, k, lambda, u_k), "truncation" (t, modes,
/// coefficient_norm, tail_bound) and, with eigenfunctions, "field" (t, x, u).
/// The physical field and the norm use the first `output.truncation` modes;
/// tail_bound bounds the discarded ones.
Outcome cmd_forward(const Problem& problem);

/// Tables "source" (k, lambda, f_k, status), "conditioning" (k,
/// amplification, lower, upper), "consistency" (k, psi_k, u_k(T),
/// abs_error, rel_error) and "summary". A mode whose source response cannot
/// be certified is a failure; the remaining modes are still reported.
Outcome cmd_inverse(const Problem& problem);

struct VerifyArgs {
  std::size_t steps = 400;
  std::optional<double> grading;       // default 2/alpha clipped to [1, 8]
  std::optional<std::size_t> modes;    // first modes only
  double residual_tol = 1e-3;          // at 400 nodes, scaled by 400/n
  double stepper_tol = 1e-3;
  double corrupt = 0.0;                // scale the closed form by 1 + corrupt
};

/// Per mode on a graded grid with `steps` nodes:
///   residual   max |d^alpha T + lambda t^beta T - t^mu f| over interior
///              nodes, relative to the largest of |t^mu f| and
///              |lambda t^beta T| there; passes below residual_tol (400/n);
///   stepper    max |T_step - T| relative to max |T|; passes below
///              stepper_tol (400/n);
///   limit      |J^(alpha-1) T(t) - phi| at t0, t0/100, t0/10^4 with
///              lambda t0^(alpha+beta) <= 1; passes when it shrinks.
/// Tables "verify" (one row per mode) and "summary".
Outcome cmd_verify(const Problem& problem, const VerifyArgs& args);

}  // namespace subdiff::cli
