#include <cmath>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "subdiff/error.hpp"

namespace {

constexpr int kRuntimeFailure = 1;
constexpr int kInputFailure = 2;

int finish(const subdiff::cli::Outcome& out, const std::string& format, const std::string& dir) {
  const auto f = format == "json" ? subdiff::cli::Format::json : subdiff::cli::Format::csv;
  if (dir.empty())
    subdiff::cli::write_tables(std::cout, out.tables, f);
  else
    subdiff::cli::write_tables(std::filesystem::path(dir), out.tables, f);
  std::cout.flush();
  for (const auto& msg : out.failures) std::cerr << "error: " << msg << '\n';
  return out.ok() ? 0 : kRuntimeFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-fractional subdiffusion: Kilbas-Saigo evaluation, forward and inverse "
               "source solves, oracle verification."};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "csv", out_dir;
  app.add_option("--format", format, "Table format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--out", out_dir, "Write one file per table into this directory");

  subdiff::cli::MlfArgs mlf_args;
  std::vector<double> ts, tlog;
  auto* mlf = app.add_subcommand("mlf", "Evaluate E_{alpha,m,l}(z) with its envelope");
  mlf->add_option("--alpha", mlf_args.alpha, "0 < alpha < 1")->required();
  mlf->add_option("--m", mlf_args.m, "m > 0")->required();
  mlf->add_option("--l", mlf_args.l, "l > -1/alpha")->required();
  mlf->add_option("--z", mlf_args.z, "Arguments z")->delimiter(',');
  mlf->add_option("--t", ts, "Arguments z = -t")->delimiter(',');
  mlf->add_option("--t-log", tlog, "START STOP COUNT: z = -t, t log-spaced")->expected(3);
  mlf->add_option("--method", mlf_args.method, "auto | series | extended | contour")
      ->capture_default_str();

  std::string problem_path;
  auto* fwd = app.add_subcommand("forward", "Solve the forward problem from a problem file");
  fwd->add_option("problem", problem_path, "Problem file (JSON)")->required();

  auto* inv = app.add_subcommand("inverse", "Recover the source from the final-time data");
  inv->add_option("problem", problem_path, "Problem file (JSON)")->required();

  subdiff::cli::VerifyArgs vargs;
  std::size_t modes = 0;
  double grading = 0.0;
  auto* ver = app.add_subcommand(
      "verify",
      "Check the closed-form mode solutions against the quadrature oracle.\n"
      "Per mode, on a graded grid of n = --steps nodes:\n"
      "  residual: max |d^a T + lambda t^b T - t^mu f| over interior nodes, divided by the\n"
      "            largest |t^mu f|, |lambda t^b T| there; must be <= residual-tol * 400/n\n"
      "  stepper:  max |T_step - T| / max |T|; must be <= stepper-tol * 400/n\n"
      "  limit:    |J^(a-1) T(t) - phi| at t0, t0/1e2, t0/1e4 must shrink\n"
      "Exit code 1 when any mode fails.");
  ver->add_option("problem", problem_path, "Problem file (JSON)")->required();
  ver->add_option("--steps", vargs.steps, "Grid nodes")->capture_default_str();
  ver->add_option("--grading", grading, "Grid exponent r (default 2/alpha clipped to [1, 8])");
  ver->add_option("--modes", modes, "Check only the first modes");
  ver->add_option("--residual-tol", vargs.residual_tol, "Residual tolerance at 400 nodes")
      ->capture_default_str();
  ver->add_option("--stepper-tol", vargs.stepper_tol, "Stepper tolerance at 400 nodes")
      ->capture_default_str();
  ver->add_option("--corrupt", vargs.corrupt,
                  "Scale the closed-form samples by 1 + EPS before checking (negative control)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputFailure;
  }

  try {
    if (*mlf) {
      for (double t : ts) mlf_args.z.push_back(0.0 - t);  // t = 0 gives +0
      if (!tlog.empty()) {
        if (!(tlog[0] > 0.0 && tlog[1] >= tlog[0] && tlog[2] >= 1 && tlog[2] == std::floor(tlog[2])))
          subdiff::throw_invalid("--t-log needs 0 < START <= STOP and an integer COUNT >= 1");
        const auto n = static_cast<std::size_t>(tlog[2]);
        for (std::size_t i = 0; i < n; ++i) {
          const double s = n == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(n - 1);
          mlf_args.z.push_back(-tlog[0] * std::pow(tlog[1] / tlog[0], s));
        }
      }
      return finish(subdiff::cli::cmd_mlf(mlf_args), format, out_dir);
    }
    const auto problem = subdiff::cli::load_problem(problem_path);
    if (*fwd) return finish(subdiff::cli::cmd_forward(problem), format, out_dir);
    if (*inv) return finish(subdiff::cli::cmd_inverse(problem), format, out_dir);
    if (*ver) {
      if (ver->count("--modes")) vargs.modes = modes;
      if (ver->count("--grading")) vargs.grading = grading;
      return finish(subdiff::cli::cmd_verify(problem, vargs), format, out_dir);
    }
  } catch (const subdiff::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    const bool input = e.kind() == subdiff::ErrorKind::invalid_params ||
                       e.kind() == subdiff::ErrorKind::unsupported_operator;
    return input ? kInputFailure : kRuntimeFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kRuntimeFailure;
}
