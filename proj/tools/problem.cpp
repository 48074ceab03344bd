#include "problem.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "subdiff/error.hpp"

namespace subdiff::cli {

namespace {

using nlohmann::json;

// Error::what() without its "<kind>: " prefix.
std::string bare_message(const Error& e) {
  std::string msg = e.what();
  const std::string prefix = std::string(to_string(e.kind())) + ": ";
  if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
  return msg;
}

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw_invalid(where + ": " + what);
}

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) bad(where, "expected an object");
  for (const auto& [k, v] : obj.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) {
      std::string list;
      for (const char* key : keys) list += std::string(list.empty() ? "" : ", ") + key;
      bad(where, "unknown key \"" + k + "\" (expected one of: " + list + ")");
    }
  }
}

double number(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) bad(where, std::string("missing \"") + key + "\"");
  const json& v = obj.at(key);
  if (!v.is_number()) bad(where + "." + key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) bad(where + "." + key, "must be finite");
  return d;
}

std::size_t count(const json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<long long>() < 1) bad(where, "expected a positive integer");
  return v.get<std::size_t>();
}

std::vector<double> numbers(const json& v, const std::string& where) {
  if (!v.is_array()) bad(where, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) bad(where + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
    if (!std::isfinite(out.back()))
      bad(where + "[" + std::to_string(i) + "]", "must be finite");
  }
  return out;
}

SpectralOperator parse_operator(const json& v) {
  if (!v.is_object() || !v.contains("type") || !v.at("type").is_string())
    bad("operator", "expected {\"type\": \"laplacian_1d\" | \"eigenvalues\", ...}");
  const std::string type = v.at("type").get<std::string>();
  if (type == "laplacian_1d") {
    only_keys(v, "operator", {"type", "modes", "grid"});
    if (!v.contains("modes")) bad("operator", "missing \"modes\"");
    const std::size_t n = count(v.at("modes"), "operator.modes");
    const std::size_t grid = v.contains("grid") ? count(v.at("grid"), "operator.grid") : 8 * n;
    return make_dirichlet_laplacian_1d(n, grid);
  }
  if (type == "eigenvalues") {
    only_keys(v, "operator", {"type", "values"});
    if (!v.contains("values")) bad("operator", "missing \"values\"");
    return SpectralOperator(numbers(v.at("values"), "operator.values"));
  }
  bad("operator.type", "unknown operator \"" + type + "\" (expected laplacian_1d or eigenvalues)");
}

CoeffSeq parse_coefficients(const json& doc, const char* key, const SpectralOperator& op) {
  const std::string where = key;
  if (!doc.contains(key)) return CoeffSeq(op.mode_count(), 0.0);
  const json& v = doc.at(key);
  CoeffSeq c;
  if (v.is_array()) {
    c = numbers(v, where);
  } else if (v.is_object() && v.contains("coefficients")) {
    only_keys(v, where, {"coefficients"});
    c = numbers(v.at("coefficients"), where + ".coefficients");
  } else if (v.is_object() && v.contains("samples")) {
    only_keys(v, where, {"samples"});
    if (!op.has_eigenfunctions())
      bad(where, "physical samples need an operator with eigenfunctions (laplacian_1d)");
    const auto s = numbers(v.at("samples"), where + ".samples");
    if (s.size() != op.grid().size())
      bad(where + ".samples", "expected " + std::to_string(op.grid().size()) +
                                  " values on the operator grid, got " + std::to_string(s.size()));
    return op.project(s);
  } else {
    bad(where, "expected a coefficient array, {\"coefficients\": [...]} or {\"samples\": [...]}");
  }
  if (c.size() != op.mode_count())
    bad(where, "has " + std::to_string(c.size()) + " coefficients, operator has " +
                   std::to_string(op.mode_count()) + " modes");
  return c;
}

OutputSpec parse_output(const json& doc, const ProblemParams& p, const SpectralOperator& op) {
  OutputSpec out;
  if (doc.contains("output")) {
    const json& v = doc.at("output");
    only_keys(v, "output", {"times", "x_count", "truncation"});
    if (v.contains("times")) {
      const json& t = v.at("times");
      if (t.is_array()) {
        out.times = numbers(t, "output.times");
      } else if (t.is_object()) {
        only_keys(t, "output.times", {"start", "stop", "count", "spacing"});
        const double a = number(t, "start", "output.times");
        const double b = number(t, "stop", "output.times");
        if (!t.contains("count")) bad("output.times", "missing \"count\"");
        const std::size_t n = count(t.at("count"), "output.times.count");
        std::string spacing = "linear";
        if (t.contains("spacing")) {
          if (!t.at("spacing").is_string()) bad("output.times.spacing", "expected a string");
          spacing = t.at("spacing").get<std::string>();
        }
        if (spacing != "linear" && spacing != "log")
          bad("output.times.spacing", "expected \"linear\" or \"log\"");
        if (!(a > 0.0 && b >= a)) bad("output.times", "needs 0 < start <= stop");
        for (std::size_t i = 0; i < n; ++i) {
          const double s = n == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(n - 1);
          out.times.push_back(spacing == "log" ? a * std::pow(b / a, s) : a + (b - a) * s);
        }
        out.times.back() = b;
      } else {
        bad("output.times", "expected an array or {start, stop, count, spacing}");
      }
    }
    if (v.contains("x_count")) out.x_count = count(v.at("x_count"), "output.x_count");
    if (v.contains("truncation")) {
      out.truncation = count(v.at("truncation"), "output.truncation");
      if (out.truncation > op.mode_count())
        bad("output.truncation", "exceeds the " + std::to_string(op.mode_count()) +
                                     " modes of the operator");
    }
  }
  if (out.times.empty())
    for (double s : {0.25, 0.5, 0.75, 1.0}) out.times.push_back(s * p.T);
  for (std::size_t i = 0; i < out.times.size(); ++i) {
    if (!(out.times[i] > 0.0 && out.times[i] <= p.T))
      bad("output.times[" + std::to_string(i) + "]", "must lie in (0, T]");
    if (i > 0 && !(out.times[i] > out.times[i - 1]))
      bad("output.times", "must be strictly increasing");
  }
  if (out.x_count < 2) bad("output.x_count", "needs at least 2 points");
  if (out.truncation == 0) out.truncation = op.mode_count();
  return out;
}

}  // namespace

Problem parse_problem(const json& doc) {
  only_keys(doc, "problem", {"params", "operator", "phi", "f", "psi", "output"});
  if (!doc.contains("params")) bad("problem", "missing \"params\"");
  if (!doc.contains("operator")) bad("problem", "missing \"operator\"");
  const json& pj = doc.at("params");
  only_keys(pj, "params", {"alpha", "beta", "mu", "T"});
  ProblemParams p{number(pj, "alpha", "params"), number(pj, "beta", "params"),
                  number(pj, "mu", "params"), number(pj, "T", "params")};
  try {
    p.validate();
  } catch (const Error& e) {
    bad("params", bare_message(e));
  }
  const bool has_f = doc.contains("f"), has_psi = doc.contains("psi");
  if (has_f == has_psi)
    bad("problem", "give exactly one of \"f\" (forward mode) and \"psi\" (inverse mode)");

  SpectralOperator op = parse_operator(doc.at("operator"));
  CoeffSeq phi = parse_coefficients(doc, "phi", op);
  std::optional<CoeffSeq> f, psi;
  if (has_f) f = parse_coefficients(doc, "f", op);
  if (has_psi) psi = parse_coefficients(doc, "psi", op);
  OutputSpec output = parse_output(doc, p, op);
  return {p, std::move(op), std::move(phi), std::move(f), std::move(psi), std::move(output)};
}

Problem load_problem(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw_invalid("cannot open problem file " + path.string());
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::exception& e) {
    throw_invalid(path.string() + ": not valid JSON (" + e.what() + ")");
  }
  try {
    return parse_problem(doc);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + bare_message(e), e.mode());
  }
}

}  // namespace subdiff::cli
