#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "subdiff/spectral.hpp"

namespace subdiff::cli {

struct OutputSpec {
  std::vector<double> times;  // 0 < t <= T, ascending; defaults to T/4 .. T
  std::size_t x_count = 33;   // physical points across the domain
  std::size_t truncation = 0; // modes kept in physical output; 0 means all
};

/// A parsed problem file. Exactly one of f (forward) and psi (inverse) is set.
struct Problem {
  ProblemParams params;
  SpectralOperator op;
  CoeffSeq phi;
  std::optional<CoeffSeq> f;
  std::optional<CoeffSeq> psi;
  OutputSpec output;
};

/// Throws an invalid-params Error whose message names the offending field.
Problem parse_problem(const nlohmann::json& doc);
Problem load_problem(const std::filesystem::path& path);

}  // namespace subdiff::cli
