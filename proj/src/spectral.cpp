#include "subdiff/spectral.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "detail/summation.hpp"
#include "subdiff/error.hpp"

namespace subdiff {

void ProblemParams::validate() const {
  std::ostringstream msg;
  if (!(alpha > 0.0 && alpha < 1.0))
    msg << "alpha = " << alpha << " violates 0 < alpha < 1";
  else if (!(beta > -alpha))
    msg << "beta = " << beta << " violates beta > -alpha (alpha = " << alpha << ")";
  else if (!(mu > -1.0))
    msg << "mu = " << mu << " violates mu > -1";
  else if (!(T > 0.0) || !std::isfinite(T))
    msg << "T = " << T << " violates 0 < T < inf";
  else
    return;
  throw_invalid(msg.str());
}

struct SpectralOperator::Basis {
  Eigenfunction v;
  std::vector<double> x;
  std::vector<double> w;
  std::vector<double> samples;  // samples[(k-1) * x.size() + i] = v_k(x_i)
};

namespace {

void validate_eigenvalues(const std::vector<double>& lambda) {
  if (lambda.empty()) throw_invalid("operator needs at least one eigenvalue");
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (!(lambda[i] > 0.0) || !std::isfinite(lambda[i]))
      throw_invalid("eigenvalue " + std::to_string(i + 1) + " = " +
                    std::to_string(lambda[i]) + " is not a positive finite number");
    if (i > 0 && lambda[i] < lambda[i - 1])
      throw_invalid("eigenvalues must be nondecreasing (lambda_" + std::to_string(i + 1) +
                    " < lambda_" + std::to_string(i) + ")");
  }
}

}  // namespace

SpectralOperator::SpectralOperator(std::vector<double> eigenvalues)
    : lambda_(std::move(eigenvalues)) {
  validate_eigenvalues(lambda_);
}

SpectralOperator::SpectralOperator(std::vector<double> eigenvalues, Eigenfunction v, double a,
                                   double b, std::size_t grid_intervals,
                                   double orthonormality_tol)
    : lambda_(std::move(eigenvalues)) {
  validate_eigenvalues(lambda_);
  if (!v) throw_invalid("empty eigenfunction evaluator");
  if (!(b > a)) throw_invalid("quadrature interval must satisfy a < b");
  if (grid_intervals < 2) throw_invalid("quadrature grid needs at least 2 intervals");

  auto basis = std::make_shared<Basis>();
  const std::size_t n = mode_count();
  const std::size_t G = grid_intervals;
  const double h = (b - a) / static_cast<double>(G);
  basis->x.resize(G + 1);
  basis->w.assign(G + 1, h);
  for (std::size_t i = 0; i <= G; ++i) basis->x[i] = a + h * static_cast<double>(i);
  basis->x[G] = b;
  basis->w[0] = basis->w[G] = 0.5 * h;
  basis->samples.resize(n * (G + 1));
  for (std::size_t k = 1; k <= n; ++k)
    for (std::size_t i = 0; i <= G; ++i)
      basis->samples[(k - 1) * (G + 1) + i] = v(k, basis->x[i]);
  basis->v = std::move(v);

  for (std::size_t j = 0; j < n; ++j) {
    const double* vj = &basis->samples[j * (G + 1)];
    for (std::size_t k = j; k < n; ++k) {
      const double* vk = &basis->samples[k * (G + 1)];
      detail::NeumaierSum s;
      for (std::size_t i = 0; i <= G; ++i) s.add(basis->w[i] * vj[i] * vk[i]);
      const double expect = j == k ? 1.0 : 0.0;
      if (!(std::abs(s.value() - expect) <= orthonormality_tol))
        throw_invalid("eigenfunctions " + std::to_string(j + 1) + " and " +
                      std::to_string(k + 1) + " are not orthonormal on the quadrature grid");
    }
  }
  basis_ = std::move(basis);
}

const SpectralOperator::Basis& SpectralOperator::basis() const {
  if (!basis_)
    throw Error(ErrorKind::unsupported_operator,
                "operator has eigenvalues only; no eigenfunction evaluator");
  return *basis_;
}

double SpectralOperator::eigenfunction(std::size_t k, double x) const {
  if (k < 1 || k > mode_count()) throw_invalid("mode index out of range");
  return basis().v(k, x);
}

const std::vector<double>& SpectralOperator::grid() const {
  static const std::vector<double> empty;
  return basis_ ? basis_->x : empty;
}

CoeffSeq SpectralOperator::project(const std::vector<double>& samples) const {
  const Basis& B = basis();
  const std::size_t P = B.x.size();
  if (samples.size() != P)
    throw_invalid("expected " + std::to_string(P) + " samples on the quadrature grid, got " +
                  std::to_string(samples.size()));
  CoeffSeq c(mode_count());
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double* vk = &B.samples[k * P];
    detail::NeumaierSum s;
    for (std::size_t i = 0; i < P; ++i) s.add(B.w[i] * samples[i] * vk[i]);
    c[k] = s.value();
  }
  return c;
}

std::vector<double> SpectralOperator::synthesize(const CoeffSeq& c,
                                                 const std::vector<double>& xs) const {
  require_length(*this, c, "coefficients");
  const Basis& B = basis();
  std::vector<double> out(xs.size(), 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = 1; k <= c.size(); ++k)
      if (c[k - 1] != 0.0) s += c[k - 1] * B.v(k, xs[i]);
    out[i] = s;
  }
  return out;
}

SpectralOperator make_dirichlet_laplacian_1d(std::size_t N, std::size_t grid_size) {
  if (N < 1) throw_invalid("Laplacian needs N >= 1 modes");
  if (grid_size < 4 * N)
    throw_invalid("grid_size = " + std::to_string(grid_size) + " must be at least 4N = " +
                  std::to_string(4 * N));
  std::vector<double> lambda(N);
  for (std::size_t k = 1; k <= N; ++k) lambda[k - 1] = static_cast<double>(k * k);
  const double scale = std::sqrt(2.0 / std::numbers::pi);
  auto v = [scale](std::size_t k, double x) { return scale * std::sin(static_cast<double>(k) * x); };
  return SpectralOperator(std::move(lambda), v, 0.0, std::numbers::pi, grid_size);
}

CoeffSeq project(const SpectralOperator& op, const std::vector<double>& samples) {
  return op.project(samples);
}

std::vector<double> synthesize(const SpectralOperator& op, const CoeffSeq& c,
                               const std::vector<double>& xs) {
  return op.synthesize(c, xs);
}

double norm_tau(const SpectralOperator& op, const CoeffSeq& c, double tau) {
  require_length(op, c, "coefficients");
  if (!std::isfinite(tau)) throw_invalid("tau must be finite");
  double s = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double w = tau == 0.0 ? c[k] : std::pow(op.eigenvalues()[k], tau) * c[k];
    s += w * w;
  }
  return std::sqrt(s);
}

void require_length(const SpectralOperator& op, const CoeffSeq& c, const char* name) {
  if (c.size() != op.mode_count())
    throw_invalid(std::string(name) + " has " + std::to_string(c.size()) +
                  " entries but the operator has " + std::to_string(op.mode_count()) +
                  " modes");
}

}  // namespace subdiff
