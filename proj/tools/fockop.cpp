#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "fockop/commands.hpp"
#include "fockop/errors.hpp"
#include "fockop/io.hpp"

namespace {

enum Exit { ok = 0, failure = 1, malformed = 2, unbounded = 3, unsupported = 4 };

struct Options {
  std::string path;
  std::optional<int> quad_nodes;
  std::optional<std::uint64_t> seed;
  bool text = false;
  bool exit_verdict = false;
  std::string suite = "all";
  int degree = 12;
};

std::vector<fockop::NamedProblem> load_all(const Options& o) {
  std::vector<fockop::NamedProblem> out;
  for (const auto& f : fockop::problem_files(o.path)) {
    fockop::WcoProblem pr = fockop::load_problem(f);
    if (o.quad_nodes) pr.quad.nodes_per_axis = *o.quad_nodes;
    if (o.seed) pr.quad.seed = *o.seed;
    out.emplace_back(f.filename().string(), std::move(pr));
  }
  return out;
}

int run_reports(fockop::Command cmd, const Options& o) {
  const auto problems = load_all(o);
  const bool many = std::filesystem::is_directory(o.path);
  fockop::Json all = fockop::Json::array();
  bool any_unbounded = false;
  fockop::CommandOptions copts;
  copts.oracle_degree = o.degree;
  for (const auto& [name, pr] : problems) {
    const fockop::Report r = fockop::run_command(cmd, pr, name, copts);
    any_unbounded = any_unbounded || r.verdict == "unbounded";
    if (o.text) std::cout << fockop::report_to_text(r);
    else all.push_back(fockop::report_to_json(r));
  }
  if (!o.text) std::cout << (many ? all : all.at(0)).dump(2) << "\n";
  return o.exit_verdict && any_unbounded ? unbounded : ok;
}

int run_verify(const Options& o) {
  const fockop::Suite suite = fockop::suite_from_string(o.suite);
  const fockop::VerifySummary s = fockop::verify(load_all(o), suite);
  if (o.text) std::cout << fockop::summary_to_text(s);
  else std::cout << fockop::summary_to_json(s).dump(2) << "\n";
  return s.failed() ? failure : ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundedness, compactness and norm bounds of weighted composition operators on Fock spaces"};
  app.set_version_flag("--version", FOCKOP_VERSION);
  app.require_subcommand(1);
  Options o;
  const auto common = [&](CLI::App* sub) {
    sub->add_option("path", o.path, "problem file or directory of *.json problems")->required();
    sub->add_option("--quad-nodes", o.quad_nodes, "Gauss-Hermite nodes per axis")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "seed for sampled directions and Monte Carlo");
    auto* json = sub->add_flag("--json", "JSON output (default)");
    auto* text = sub->add_flag("--text", o.text, "plain text output");
    json->excludes(text);
  };
  auto* classify = app.add_subcommand("classify", "bounded / compact verdict with certificate");
  auto* bounds = app.add_subcommand("bounds", "two-sided operator norm bounds");
  auto* essnorm = app.add_subcommand("essnorm", "essential norm bounds (1 < p <= q)");
  auto* oracle = app.add_subcommand("oracle", "bounds next to truncation and Rayleigh-quotient estimates");
  auto* verify = app.add_subcommand("verify", "run the property suites over a corpus");
  for (auto* sub : {classify, bounds, essnorm, oracle}) {
    common(sub);
    sub->add_flag("--exit-verdict", o.exit_verdict, "exit 3 if any problem is unbounded");
  }
  common(verify);
  verify->add_option("--suite", o.suite, "lemmas, sandwich, normalization, classification or all");
  oracle->add_option("--degree", o.degree, "truncation degree N")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : malformed;
  }

  try {
    if (verify->parsed()) return run_verify(o);
    if (classify->parsed()) return run_reports(fockop::Command::classify, o);
    if (bounds->parsed()) return run_reports(fockop::Command::bounds, o);
    if (essnorm->parsed()) return run_reports(fockop::Command::essnorm, o);
    return run_reports(fockop::Command::oracle, o);
  } catch (const fockop::UnsupportedError& e) {
    std::cerr << "fockop: unsupported: " << e.what() << " (the essential-norm theorem covers 1 < p <= q only)\n";
    return unsupported;
  } catch (const fockop::ParseError& e) {
    std::cerr << "fockop: malformed input: " << e.what() << "\n";
    return malformed;
  } catch (const fockop::Error& e) {
    std::cerr << "fockop: " << e.what() << "\n";
    return failure;
  }
}
