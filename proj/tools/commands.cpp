#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "subdiff/error.hpp"
#include "subdiff/forward.hpp"
#include "subdiff/inverse.hpp"
#include "subdiff/oracle.hpp"

namespace subdiff::cli {

namespace {

Cell index(std::size_t k) { return static_cast<long long>(k); }

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

mlf::Method parse_method(const std::string& name) {
  if (name == "auto") return mlf::Method::automatic;
  if (name == "series") return mlf::Method::series;
  if (name == "extended") return mlf::Method::extended;
  if (name == "contour") return mlf::Method::contour;
  throw_invalid("method \"" + name + "\" is not one of auto, series, extended, contour");
}

}  // namespace

Outcome cmd_mlf(const MlfArgs& args) {
  const mlf::KilbasSaigoParams p{args.alpha, args.m, args.l};
  p.validate();
  if (args.z.empty()) throw_invalid("give at least one argument with --z or --t");
  mlf::EvalOptions opts;
  opts.method = parse_method(args.method);
  const mlf::KilbasSaigoFunction E(p, opts);
  const mlf::Envelope env = mlf::envelope_for(p);

  Outcome out;
  Table t("mlf", {"z", "value", "terms_used", "precision_mode", "bound_check", "lower_bound",
                  "upper_bound"});
  for (double z : args.z) {
    const mlf::EvalReport r = E.eval(z);
    Cell lo, up;
    if (z <= 0.0 && env == mlf::Envelope::upper_only) {
      up = mlf::upper_bound_prop1(p, -z);
    } else if (z <= 0.0 && env == mlf::Envelope::sandwich) {
      const auto [a, b] = mlf::bounds_prop2(p, -z);
      lo = a;
      up = b;
    }
    t.add({z, r.value, index(r.terms_used), std::string(mlf::to_string(r.precision_mode)),
           std::string(mlf::to_string(r.bound_check)), lo, up});
    if (r.bound_check == mlf::BoundCheck::violated)
      out.failures.push_back("z = " + sci(z) + ": value " + format_number(r.value) +
                             " lies outside its envelope");
  }
  out.tables.push_back(std::move(t));
  return out;
}

Outcome cmd_forward(const Problem& pr) {
  if (!pr.f) throw_invalid("forward needs a forward-mode problem file (with \"f\")");
  const SolutionField u = solve_forward(pr.params, pr.op, pr.phi, *pr.f);
  const std::size_t N = pr.op.mode_count();
  const std::size_t n = pr.output.truncation;

  Table coeffs("coefficients", {"t", "k", "lambda", "u_k"});
  Table trunc("truncation", {"t", "modes", "coefficient_norm", "tail_bound"});
  Table field("field", {"t", "x", "u"});
  std::vector<double> xs;
  if (pr.op.has_eigenfunctions()) {
    const double a = pr.op.grid().front(), b = pr.op.grid().back();
    const std::size_t m = pr.output.x_count;
    for (std::size_t i = 0; i < m; ++i)
      xs.push_back(i + 1 == m ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(m - 1));
  }
  for (double t : pr.output.times) {
    CoeffSeq c = u.coefficients(t);
    double norm2 = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
      coeffs.add({t, index(k + 1), pr.op.eigenvalues()[k], c[k]});
      if (k < n) norm2 += c[k] * c[k];
    }
    trunc.add({t, index(n), std::sqrt(norm2), tail_bound(pr.params, pr.op, pr.phi, *pr.f, n, t)});
    if (!xs.empty()) {
      std::fill(c.begin() + static_cast<std::ptrdiff_t>(n), c.end(), 0.0);
      const auto vals = pr.op.synthesize(c, xs);
      for (std::size_t i = 0; i < xs.size(); ++i) field.add({t, xs[i], vals[i]});
    }
  }
  Outcome out;
  out.tables.push_back(std::move(coeffs));
  out.tables.push_back(std::move(trunc));
  if (!xs.empty()) out.tables.push_back(std::move(field));
  return out;
}

Outcome cmd_inverse(const Problem& pr) {
  if (!pr.psi) throw_invalid("inverse needs an inverse-mode problem file (with \"psi\")");
  const ProblemParams& p = pr.params;
  const std::size_t N = pr.op.mode_count();
  const CoeffSeq& psi = *pr.psi;
  Outcome out;

  Table source("source", {"k", "lambda", "f_k", "status"});
  Table cons("consistency", {"k", "psi_k", "u_k_T", "abs_error", "rel_error"});
  Table summary("summary", {"quantity", "value"});

  auto add_consistency = [&](std::size_t k, double uT, double& worst_abs, double& worst_rel) {
    const double err = std::abs(uT - psi[k]);
    Cell rel;
    if (psi[k] != 0.0) {
      rel = err / std::abs(psi[k]);
      worst_rel = std::max(worst_rel, err / std::abs(psi[k]));
    }
    worst_abs = std::max(worst_abs, err);
    cons.add({index(k + 1), psi[k], uT, err, rel});
  };
  double worst_abs = 0.0, worst_rel = 0.0;

  std::optional<InverseSolution> sol;
  try {
    sol.emplace(solve_inverse(p, pr.op, pr.phi, psi));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::conditioning && e.kind() != ErrorKind::evaluation_failure) throw;
  }

  if (sol) {
    const CoeffSeq uT = sol->u.coefficients(p.T);
    const ConditioningReport cr = conditioning_report(p, pr.op);
    Table cond("conditioning", {"k", "amplification", "lower", "upper"});
    for (std::size_t k = 0; k < N; ++k) {
      source.add({index(k + 1), pr.op.eigenvalues()[k], sol->f[k], std::string("ok")});
      cond.add({index(k + 1), cr.amplification[k], cr.lower[k], cr.upper[k]});
      add_consistency(k, uT[k], worst_abs, worst_rel);
    }
    summary.add({std::string("growth_constant"), cr.growth_constant});
    summary.add({std::string("psi_domain_tail"), sol->psi_domain_tail});
    summary.add({std::string("max_abs_consistency_error"), worst_abs});
    summary.add({std::string("max_rel_consistency_error"), worst_rel});
    summary.add({std::string("failed_modes"), 0LL});
    out.tables.push_back(std::move(source));
    out.tables.push_back(std::move(cond));
    out.tables.push_back(std::move(cons));
    out.tables.push_back(std::move(summary));
    return out;
  }

  // Some mode failed: redo mode by mode so every failure is reported.
  const ModeKernel K(p);
  long long failed = 0;
  for (std::size_t k = 0; k < N; ++k) {
    const double lambda = pr.op.eigenvalues()[k];
    try {
      const double fk =
          reconstruct_f(p, SpectralOperator({lambda}), {pr.phi[k]}, {psi[k]}).front();
      source.add({index(k + 1), lambda, fk, std::string("ok")});
      add_consistency(k, K(lambda, pr.phi[k], fk, p.T), worst_abs, worst_rel);
    } catch (const Error& e) {
      ++failed;
      source.add({index(k + 1), lambda, Cell{}, std::string(to_string(e.kind()))});
      out.failures.push_back(e.with_mode(k + 1).what());
    }
  }
  summary.add({std::string("max_abs_consistency_error"), worst_abs});
  summary.add({std::string("max_rel_consistency_error"), worst_rel});
  summary.add({std::string("failed_modes"), failed});
  out.tables.push_back(std::move(source));
  out.tables.push_back(std::move(cons));
  out.tables.push_back(std::move(summary));
  return out;
}

Outcome cmd_verify(const Problem& pr, const VerifyArgs& args) {
  if (!pr.f) throw_invalid("verify needs a forward-mode problem file (with \"f\")");
  if (args.steps < 8) throw_invalid("verify needs --steps >= 8");
  if (!(args.corrupt > -1.0)) throw_invalid("--corrupt must exceed -1");
  const ProblemParams& p = pr.params;
  const double r = args.grading.value_or(oracle::GradedGrid::default_exponent(p.alpha));
  const oracle::GradedGrid grid(p.T, args.steps, r);
  const std::size_t K = std::min(args.modes.value_or(pr.op.mode_count()), pr.op.mode_count());
  const double scale_n = 400.0 / static_cast<double>(args.steps);
  const double res_tol = args.residual_tol * scale_n;
  const double step_tol = args.stepper_tol * scale_n;
  const ModeKernel kernel(p);
  const auto& ts = grid.points();
  const double predicted = std::min(p.alpha + p.beta, 1.0 + p.mu);

  Outcome out;
  Table table("verify", {"k", "lambda", "residual", "residual_node", "residual_t", "residual_tol",
                         "stepper_dev", "stepper_node", "stepper_tol", "limit_t", "limit_error",
                         "limit_slope", "limit_predicted", "pass"});
  long long failed_modes = 0;
  for (std::size_t k = 1; k <= K; ++k) {
    const double lambda = pr.op.eigenvalue(k);
    const double phi = pr.phi[k - 1], f = (*pr.f)[k - 1];
    std::vector<std::string> why;
    std::vector<Cell> row{index(k), lambda};
    try {
      std::vector<double> T(ts.size());
      for (std::size_t i = 0; i < ts.size(); ++i) T[i] = kernel(lambda, phi, f, ts[i]);
      if (args.corrupt != 0.0)
        for (double& v : T) v *= 1.0 + args.corrupt;

      // residual relative to the size of the terms it balances
      const oracle::Residual res = oracle::ode_residual(p, lambda, phi, f, grid, T);
      double scale = 0.0;
      for (std::size_t i = 1; i + 1 < ts.size(); ++i)
        scale = std::max({scale, std::abs(f) * std::pow(ts[i], p.mu),
                          lambda * std::pow(ts[i], p.beta) * std::abs(T[i])});
      const double rel_res = res.max_abs == 0.0 ? 0.0 : res.max_abs / scale;
      row.insert(row.end(), {rel_res, index(res.node), res.t, res_tol});
      if (!(rel_res <= res_tol))
        why.push_back("residual " + sci(rel_res) + " exceeds " + sci(res_tol) + " at node " +
                      std::to_string(res.node) + " (t = " + sci(res.t) + ")");

      const auto step = oracle::timestep_scalar_cauchy(p, lambda, phi, f, grid);
      double dev = 0.0, peak = 0.0;
      std::size_t dev_node = 0;
      for (std::size_t i = 0; i < ts.size(); ++i) {
        peak = std::max(peak, std::abs(T[i]));
        if (std::abs(step[i] - T[i]) > dev) {
          dev = std::abs(step[i] - T[i]);
          dev_node = i + 1;
        }
      }
      const double rel_dev = dev == 0.0 ? 0.0 : dev / peak;
      row.insert(row.end(), {rel_dev, index(dev_node), step_tol});
      if (!(rel_dev <= step_tol))
        why.push_back("stepper deviation " + sci(rel_dev) + " exceeds " + sci(step_tol) +
                      " at node " + std::to_string(dev_node) + " (t = " +
                      sci(dev_node ? ts[dev_node - 1] : 0.0) + ")");

      // J^(alpha-1) T -> phi; stay where the series is benign
      const double t0 = std::min(1e-2 * p.T, std::pow(lambda, -1.0 / (p.alpha + p.beta)));
      double e[3];
      for (int j = 0; j < 3; ++j) {
        const double t = t0 * std::pow(1e-2, j);
        e[j] = std::abs(initial_limit(p, lambda, phi, f, t) - phi);
      }
      const double tiny = 1e-15 * (std::abs(phi) + std::abs(f));
      const bool shrinking = (e[1] < e[0] && e[2] < e[1]) || e[0] <= tiny;
      Cell slope;
      if (e[0] > 0.0 && e[2] > 0.0) slope = std::log(e[0] / e[2]) / std::log(1e4);
      row.insert(row.end(), {t0 * 1e-4, e[2], slope, predicted});
      if (!shrinking)
        why.push_back("initial limit error does not shrink toward t = 0 (" + sci(e[0]) + ", " +
                      sci(e[1]) + ", " + sci(e[2]) + ")");
    } catch (const Error& err) {
      why.push_back(err.what());
      row.resize(table.columns.size() - 1);
    }
    row.push_back(std::string(why.empty() ? "pass" : "fail"));
    table.add(std::move(row));
    if (!why.empty()) ++failed_modes;
    for (const auto& w : why) out.failures.push_back("mode " + std::to_string(k) + ": " + w);
  }

  Table summary("summary", {"quantity", "value"});
  summary.add({std::string("steps"), static_cast<long long>(args.steps)});
  summary.add({std::string("grading"), r});
  summary.add({std::string("corrupt"), args.corrupt});
  summary.add({std::string("modes_checked"), static_cast<long long>(K)});
  summary.add({std::string("modes_failed"), failed_modes});
  out.tables.push_back(std::move(table));
  out.tables.push_back(std::move(summary));
  return out;
}

}  // namespace subdiff::cli
