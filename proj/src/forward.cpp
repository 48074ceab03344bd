#include "subdiff/forward.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <string>
#include <utility>

#include "detail/parallel.hpp"
#include "detail/summation.hpp"
#include "subdiff/error.hpp"

namespace subdiff {

namespace {

const ProblemParams& validated(const ProblemParams& p) {
  p.validate();
  return p;
}

void check_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t))
    throw_invalid("evaluation time t = " + std::to_string(t) + " must be positive and finite");
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw_invalid("eigenvalue " + std::to_string(lambda) + " must be positive and finite");
}

}  // namespace

ModeKernel::ModeKernel(const ProblemParams& p, mlf::EvalOptions opts)
    : p_(validated(p)),
      e1_(p.homogeneous_index(), opts),
      e2_(p.source_index(), opts),
      log_gamma_alpha_(std::lgamma(p.alpha)),
      source_gain_(std::exp(std::lgamma(p.mu + 1.0) - std::lgamma(p.mu + p.alpha + 1.0))) {}

double ModeKernel::homogeneous(double lambda, double t) const {
  check_time(t);
  check_lambda(lambda);
  const double lt = std::log(t);
  const double z = -lambda * std::exp((p_.alpha + p_.beta) * lt);
  return std::exp((p_.alpha - 1.0) * lt - log_gamma_alpha_) * e1_(z);
}

double ModeKernel::source(double lambda, double t) const {
  check_time(t);
  check_lambda(lambda);
  const double lt = std::log(t);
  const double z = -lambda * std::exp((p_.alpha + p_.beta) * lt);
  return source_gain_ * std::exp((p_.alpha + p_.mu) * lt) * e2_(z);
}

double ModeKernel::operator()(double lambda, double phi, double f, double t) const {
  check_time(t);
  check_lambda(lambda);
  double v = 0.0;
  if (phi != 0.0) v += phi * homogeneous(lambda, t);
  if (f != 0.0) v += f * source(lambda, t);
  return v;
}

double mode_solution(const ProblemParams& params, double lambda_k, double phi_k, double f_k,
                     double t) {
  return ModeKernel(params)(lambda_k, phi_k, f_k, t);
}

struct SolutionField::Cache {
  static constexpr std::size_t kMaxEntries = std::size_t{1} << 20;
  mutable std::mutex mu;
  std::map<std::pair<std::size_t, double>, double> values;
};

SolutionField::SolutionField(ProblemParams params, SpectralOperator op, CoeffSeq phi, CoeffSeq f,
                             mlf::EvalOptions opts)
    : kernel_(params, opts),
      op_(std::move(op)),
      phi_(std::move(phi)),
      f_(std::move(f)),
      cache_(std::make_unique<Cache>()) {
  require_length(op_, phi_, "phi");
  require_length(op_, f_, "f");
}

SolutionField::SolutionField(SolutionField&&) noexcept = default;
SolutionField& SolutionField::operator=(SolutionField&&) noexcept = default;
SolutionField::~SolutionField() = default;

double SolutionField::mode(std::size_t k, double t) const {
  if (k < 1 || k > op_.mode_count())
    throw_invalid("mode index " + std::to_string(k) + " out of range");
  check_time(t);
  const auto key = std::make_pair(k, t);
  {
    std::lock_guard lock(cache_->mu);
    if (auto it = cache_->values.find(key); it != cache_->values.end()) return it->second;
  }
  double v;
  try {
    v = kernel_(op_.eigenvalues()[k - 1], phi_[k - 1], f_[k - 1], t);
  } catch (const Error& e) {
    throw e.with_mode(k);
  }
  std::lock_guard lock(cache_->mu);
  if (cache_->values.size() >= Cache::kMaxEntries) cache_->values.clear();
  cache_->values.emplace(key, v);
  return v;
}

CoeffSeq SolutionField::coefficients(double t) const {
  check_time(t);
  CoeffSeq out(op_.mode_count());
  detail::parallel_for(out.size(), [&](std::size_t i) { out[i] = mode(i + 1, t); });
  return out;
}

std::vector<double> SolutionField::evaluate(const std::vector<double>& xs, double t) const {
  return op_.synthesize(coefficients(t), xs);
}

std::size_t SolutionField::cache_size() const {
  std::lock_guard lock(cache_->mu);
  return cache_->values.size();
}

SolutionField solve_forward(const ProblemParams& params, const SpectralOperator& op,
                            const CoeffSeq& phi, const CoeffSeq& f, mlf::EvalOptions opts) {
  return SolutionField(params, op, phi, f, opts);
}

double tail_bound(const ProblemParams& params, const SpectralOperator& op, const CoeffSeq& phi,
                  const CoeffSeq& f, std::size_t n, double t) {
  params.validate();
  require_length(op, phi, "phi");
  require_length(op, f, "f");
  check_time(t);
  if (n > op.mode_count()) throw_invalid("truncation level exceeds the mode count");

  const auto i1 = params.homogeneous_index();
  const auto i2 = params.source_index();
  const double lt = std::log(t);
  const double scale1 = std::exp((params.alpha - 1.0) * lt - std::lgamma(params.alpha));
  const double scale2 = std::exp(std::lgamma(params.mu + 1.0) -
                                 std::lgamma(params.mu + params.alpha + 1.0) +
                                 (params.alpha + params.mu) * lt);
  const double tr = std::exp((params.alpha + params.beta) * lt);
  double sum = 0.0;
  for (std::size_t k = n; k < op.mode_count(); ++k) {
    const double x = op.eigenvalues()[k] * tr;
    double b = 0.0;
    if (phi[k] != 0.0) b += std::abs(phi[k]) * scale1 * mlf::upper_bound_prop1(i1, x);
    if (f[k] != 0.0) b += std::abs(f[k]) * scale2 * mlf::bounds_prop2(i2, x).second;
    sum += b * b;
  }
  return std::sqrt(sum);
}

double initial_limit(const ProblemParams& params, double lambda_k, double phi_k, double f_k,
                     double t) {
  params.validate();
  check_time(t);
  check_lambda(lambda_k);
  const double a = params.alpha;
  const double rho = params.alpha + params.beta;
  const double log_x = std::log(lambda_k) + rho * std::log(t);
  constexpr std::size_t kMaxTerms = 5000;
  constexpr double kTol = 1e-17;

  // sum_j (-1)^j exp(log_c_j + j log_x + extra_j), with log_c_j from the
  // coefficient recursion of E_{alpha, m, l}.
  auto series = [&](double l, auto&& extra) {
    detail::NeumaierSum s;
    double log_c = 0.0;
    double max_abs = 0.0;
    int small = 0;
    for (std::size_t j = 0; j < kMaxTerms; ++j) {
      const double jd = static_cast<double>(j);
      const double term_log = log_c + jd * log_x + extra(jd);
      const double term = (j % 2 ? -1.0 : 1.0) * std::exp(term_log);
      s.add(term);
      max_abs = std::max(max_abs, std::abs(s.value()));
      if (j >= 8 && std::abs(term) <= kTol * std::abs(s.value())) {
        if (++small == 3) {
          if (max_abs > 1e8 * std::abs(s.value()))
            throw Error(ErrorKind::evaluation_failure,
                        "initial-limit series cancels; use a smaller t");
          return s.value();
        }
      } else {
        small = 0;
      }
      const double g = a * (jd * params.m() + l);
      log_c += std::lgamma(g + 1.0) - std::lgamma(g + a + 1.0);
    }
    throw Error(ErrorKind::evaluation_failure,
                "initial-limit series did not converge in " + std::to_string(kMaxTerms) +
                    " terms");
  };

  double v = 0.0;
  if (phi_k != 0.0) {
    // J^(alpha-1) t^(alpha-1+j rho) = Gamma(alpha+j rho)/Gamma(1+j rho) t^(j rho)
    const double lga = std::lgamma(a);
    v += phi_k * series(params.l1(), [&](double j) {
      return std::lgamma(a + j * rho) - std::lgamma(1.0 + j * rho) - lga;
    });
  }
  if (f_k != 0.0) {
    const double mu = params.mu;
    const double head = std::lgamma(mu + 1.0) - std::lgamma(mu + a + 1.0) + (1.0 + mu) * std::log(t);
    v += f_k * series(params.l2(), [&](double j) {
      return head + std::lgamma(a + mu + 1.0 + j * rho) - std::lgamma(mu + 2.0 + j * rho);
    });
  }
  return v;
}

}  // namespace subdiff
