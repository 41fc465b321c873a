#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fockop/wco.hpp"

namespace fockop {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

/// Problem files: {"version", "n", "p", "q", "psi": [{"coeff", "power",
/// "freq"}], "phi": {"A", "b"}, "quad": {...}}. ParseError on anything else.
WcoProblem problem_from_json(const Json& j);
Json problem_to_json(const WcoProblem& problem);
WcoProblem load_problem(const std::filesystem::path& path);

QuadSpec quad_from_json(const Json& j, QuadSpec base = {});
Json quad_to_json(const QuadSpec& spec);

/// JSON numbers for finite values, {"finite": false} for +inf.
Json real_to_json(double x);
double real_from_json(const Json& j);

struct BoundsSection {
  double lower = 0.0;
  double upper = 0.0;
  std::string mode;
  bool up_to_constant = false;
};

struct OracleSection {
  int max_degree = 0;
  std::optional<double> truncated_norm;
  std::optional<double> essential_upper;
  double max_quotient = 0.0;
  std::string argmax_descriptor;
};

struct Report {
  std::string tool_version;
  std::string command;
  std::string source;
  std::string verdict;
  std::string mode;
  std::string certificate;
  double ell_sup = 0.0;
  std::optional<BoundsSection> bounds;
  std::optional<BoundsSection> essential;
  std::optional<OracleSection> oracle;
  std::string note;
  Json problem;
  Json quad;
};

Json report_to_json(const Report& r);
Report report_from_json(const Json& j);
std::string report_to_text(const Report& r);

}  // namespace fockop
