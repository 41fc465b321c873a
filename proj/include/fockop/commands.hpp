#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "fockop/io.hpp"
#include "fockop/wco.hpp"

namespace fockop {

enum class Command { classify, bounds, essnorm, oracle };

std::string to_string(Command c);

struct CommandOptions {
  int oracle_degree = 12;
};

/// Report for one problem. UnsupportedError from essnorm propagates.
Report run_command(Command cmd, const WcoProblem& problem, const std::string& source,
                   const CommandOptions& opts = {});

enum class Suite { lemmas, sandwich, normalization, classification, all };

Suite suite_from_string(const std::string& name);
std::string to_string(Suite s);

struct CheckResult {
  std::string suite;
  std::string property;
  std::string source;
  bool passed = true;
  std::string detail;
};

struct VerifySummary {
  std::vector<CheckResult> checks;
  std::size_t passed() const;
  std::size_t failed() const;
};

using NamedProblem = std::pair<std::string, WcoProblem>;

/// *.json files of a directory in lexicographic order; a single file is
/// returned as is.
std::vector<std::filesystem::path> problem_files(const std::filesystem::path& path);

/// Runs the suite over every problem; threads <= 0 means FOCKOP_THREADS or
/// the hardware concurrency. Result order does not depend on threads.
VerifySummary verify(const std::vector<NamedProblem>& problems, Suite suite, int threads = 0);

std::string summary_to_text(const VerifySummary& s);
Json summary_to_json(const VerifySummary& s);

int thread_budget();

}  // namespace fockop
