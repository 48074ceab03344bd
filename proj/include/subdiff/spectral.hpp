#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "subdiff/kilbas_saigo.hpp"

namespace subdiff {

/// Fourier coefficients h_1..h_N; element i holds mode i+1.
using CoeffSeq = std::vector<double>;

/// Exponents of  d^alpha u + t^beta A u = t^mu f  on (0, T].
struct ProblemParams {
  double alpha = 0.5;
  double beta = 0.0;
  double mu = 0.0;
  double T = 1.0;

  /// 0 < alpha < 1, beta > -alpha, mu > -1, T > 0.
  void validate() const;

  double m() const { return 1.0 + beta / alpha; }
  double l1() const { return 1.0 + (beta - 1.0) / alpha; }
  double l2() const { return 1.0 + (beta + mu) / alpha; }
  /// Index of the phi-term function (l1 = m - 1/alpha).
  mlf::KilbasSaigoParams homogeneous_index() const { return {alpha, m(), l1()}; }
  /// Index of the source-term function (l2 > m - 1/alpha).
  mlf::KilbasSaigoParams source_index() const { return {alpha, m(), l2()}; }
};

/// A self-adjoint positive operator given by its first N eigenpairs.
///
/// Eigenfunctions are optional. When present they come with a uniform
/// quadrature grid on [a, b] (composite trapezoid), and orthonormality on
/// that grid is checked at construction.
class SpectralOperator {
 public:
  using Eigenfunction = std::function<double(std::size_t k, double x)>;  // k is 1-based

  explicit SpectralOperator(std::vector<double> eigenvalues);
  SpectralOperator(std::vector<double> eigenvalues, Eigenfunction v, double a, double b,
                   std::size_t grid_intervals, double orthonormality_tol = 1e-10);

  std::size_t mode_count() const noexcept { return lambda_.size(); }
  const std::vector<double>& eigenvalues() const noexcept { return lambda_; }
  double eigenvalue(std::size_t k) const { return lambda_.at(k - 1); }

  bool has_eigenfunctions() const noexcept { return basis_ != nullptr; }
  /// v_k(x); unsupported-operator error without eigenfunctions.
  double eigenfunction(std::size_t k, double x) const;
  /// Quadrature nodes (empty without eigenfunctions).
  const std::vector<double>& grid() const;

  /// Coefficients h_k = (h, v_k) of samples taken on grid().
  CoeffSeq project(const std::vector<double>& samples) const;
  /// sum_k h_k v_k(x) at each x, ascending k.
  std::vector<double> synthesize(const CoeffSeq& c, const std::vector<double>& xs) const;

 private:
  struct Basis;
  const Basis& basis() const;

  std::vector<double> lambda_;
  std::shared_ptr<const Basis> basis_;
};

/// lambda_k = k^2, v_k = sqrt(2/pi) sin(kx) on (0, pi); grid_size >= 4N intervals.
SpectralOperator make_dirichlet_laplacian_1d(std::size_t N, std::size_t grid_size);

CoeffSeq project(const SpectralOperator& op, const std::vector<double>& samples);
std::vector<double> synthesize(const SpectralOperator& op, const CoeffSeq& c,
                               const std::vector<double>& xs);

/// sqrt(sum lambda_k^(2 tau) h_k^2), the D(A^tau) norm of the truncation.
double norm_tau(const SpectralOperator& op, const CoeffSeq& c, double tau);

/// Invalid-params error unless c has op.mode_count() entries.
void require_length(const SpectralOperator& op, const CoeffSeq& c, const char* name);

}  // namespace subdiff
