#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fockop/commands.hpp"
#include "fockop/errors.hpp"
#include "fockop/io.hpp"

using namespace fockop;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + FOCKOP_BIN + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const fs::path corpus = CORPUS_DIR;
const fs::path golden = GOLDEN_DIR;

fs::path scratch(const std::string& name, const std::string& body) {
  const fs::path dir = fs::temp_directory_path() / "fockop_cli_test";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << body;
  return p;
}

}  // namespace

TEST_CASE("golden reports") {
  for (const auto& entry : fs::directory_iterator(golden)) {
    const std::string name = entry.path().filename().string();
    if (entry.path().extension() != ".json") continue;
    const auto first = name.find('.');
    const auto second = name.find('.', first + 1);
    const std::string problem = name.substr(0, first), cmd = name.substr(first + 1, second - first - 1);
    const Run r = run(cmd + " " + (corpus / (problem + ".json")).string());
    CHECK_MESSAGE(r.code == 0, name);
    CHECK_MESSAGE(r.out == slurp(entry.path()), name);
  }
  const Run v = run("verify " + corpus.string() + " --text");
  CHECK(v.code == 0);
  CHECK(v.out == slurp(golden / "corpus.verify.txt"));
}

TEST_CASE("exit codes") {
  CHECK(run("classify " + (corpus / "identity_n1.json").string()).code == 0);
  CHECK(run("classify " + (corpus / "identity_n1.json").string() + " --exit-verdict").code == 0);
  CHECK(run("classify " + (corpus / "inadmissible_2z.json").string()).code == 0);
  CHECK(run("classify " + (corpus / "inadmissible_2z.json").string() + " --exit-verdict").code == 3);
  CHECK(run("bounds " + corpus.string() + " --exit-verdict").code == 3);
  CHECK(run("essnorm " + (corpus / "qp_compact_n2.json").string()).code == 4);
  CHECK(run("essnorm " + (corpus / "identity_n1.json").string()).code == 0);
  CHECK(run("classify /nonexistent/problem.json").code == 2);
  CHECK(run("classify " + scratch("broken.json", "{\"version\": 1,").string()).code == 2);
  CHECK(run("classify " + scratch("nover.json", "{\"n\": 1}").string()).code == 2);
  const std::string mismatch =
      R"({"version":1,"n":2,"p":2,"q":2,"psi":[{"coeff":[1,0],"power":[0],"freq":[[0,0]]}],"phi":{"A":[[1,0]],"b":[[0,0]]}})";
  CHECK(run("classify " + scratch("mismatch.json", mismatch).string()).code == 2);
  CHECK(run("verify " + corpus.string() + " --suite nonsense").code == 2);
  CHECK(run("frobnicate x").code == 2);
  CHECK(run("verify " + corpus.string() + " --suite lemmas").code == 0);
}

TEST_CASE("identity and rank-0 examples") {
  const Json id = Json::parse(run("bounds " + (corpus / "identity_n1.json").string()).out);
  CHECK(id["verdict"] == "bounded_not_compact");
  CHECK(id["bounds"]["lower"].get<double>() == doctest::Approx(1.0));
  CHECK(id["bounds"]["upper"].get<double>() == doctest::Approx(1.0));

  const Json r0 = Json::parse(run("bounds " + (corpus / "rank0_kernel_n2.json").string()).out);
  const WcoProblem pr = problem_from_json(r0["problem"]);
  const double expect = std::exp(0.5 * (norm_sq(pr.phi.b) + norm_sq(pr.psi.terms()[0].freq)));
  CHECK(r0["bounds"]["lower"].get<double>() == doctest::Approx(expect).epsilon(1e-12));

  const Json bad = Json::parse(run("classify " + (corpus / "inadmissible_2z.json").string()).out);
  CHECK(bad["certificate"].get<std::string>().find("spectral norm 2 > 1") != std::string::npos);
  CHECK(bad["ell_sup"] == Json{{"finite", false}});

  const Run text = run("bounds " + (corpus / "half_n1.json").string() + " --text");
  CHECK(text.out.find("norm         [1, 2]") != std::string::npos);
}

TEST_CASE("reports round-trip") {
  for (const auto& f : problem_files(corpus)) {
    const Json j = Json::parse(run("bounds " + f.string()).out);
    CHECK(report_to_json(report_from_json(j)) == j);
    const WcoProblem pr = problem_from_json(j["problem"]);
    CHECK(problem_to_json(pr) == j["problem"]);
  }
  Report r;
  r.ell_sup = INFINITY;
  r.bounds = BoundsSection{1.0, 2.0, "closed_form", true};
  r.oracle = OracleSection{8, 1.5, std::nullopt, 1.25, "k_w w=(0)"};
  const Json j = report_to_json(r);
  CHECK(j["ell_sup"] == Json{{"finite", false}});
  const Report back = report_from_json(j);
  CHECK(std::isinf(back.ell_sup));
  CHECK(report_to_json(back) == j);
  CHECK_THROWS_AS(report_from_json(Json{{"verdict", "x"}}), ParseError);
  CHECK_THROWS_AS(real_to_json(NAN), NumericalError);
}

TEST_CASE("overrides and quad section") {
  const Json j = Json::parse(run("classify " + (corpus / "half_n1.json").string() + " --quad-nodes 24 --seed 5").out);
  CHECK(j["quad"]["nodes_per_axis"] == 24);
  CHECK(j["quad"]["seed"] == 5);
  CHECK_THROWS_AS(quad_from_json(Json{{"bogus", 1}}), ParseError);
  CHECK_THROWS_AS(quad_from_json(Json{{"method", "simpson"}}), ParseError);
  CHECK(quad_from_json(Json{{"nodes_per_axis", 12}}).nodes_per_axis == 12);
}

TEST_CASE("verify output is deterministic across runs and thread counts") {
  const std::string args = "verify " + corpus.string();
  const Run a = run(args), b = run(args), c = run(args, "FOCKOP_THREADS=1"), d = run(args, "FOCKOP_THREADS=4");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);
  CHECK(a.out == d.out);
  const Json s = Json::parse(a.out);
  CHECK(s["failed"] == 0);
  CHECK(s["passed"].get<int>() > 100);
}
