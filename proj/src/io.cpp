#include "fockop/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "fockop/errors.hpp"

namespace fockop {

namespace {

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(where + ": missing \"" + key + "\"");
  return j.at(key);
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + ": expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw ParseError(where + ": non-finite number");
  return x;
}

Complex complex_of(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw ParseError(where + ": expected [re, im]");
  return {number(j[0], where), number(j[1], where)};
}

CVector cvector_of(const Json& j, std::size_t n, const std::string& where) {
  if (!j.is_array() || j.size() != n)
    throw ParseError(where + ": expected " + std::to_string(n) + " [re, im] pairs");
  CVector v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(complex_of(j[i], where + "[" + std::to_string(i) + "]"));
  return v;
}

Json pair(Complex z) { return Json::array({z.real(), z.imag()}); }

Json pairs(std::span<const Complex> v) {
  Json a = Json::array();
  for (const auto& z : v) a.push_back(pair(z));
  return a;
}

std::string fixed(double x) {
  if (!std::isfinite(x)) return "inf";
  std::ostringstream o;
  o.precision(10);
  o << x;
  return o.str();
}

Json bounds_json(const BoundsSection& b) {
  return Json{{"lower", real_to_json(b.lower)}, {"upper", real_to_json(b.upper)}, {"mode", b.mode},
              {"upper_is_up_to_universal_constant", b.up_to_constant}};
}

BoundsSection bounds_of(const Json& j) {
  return {real_from_json(j.at("lower")), real_from_json(j.at("upper")), j.at("mode").get<std::string>(),
          j.at("upper_is_up_to_universal_constant").get<bool>()};
}

}  // namespace

Json real_to_json(double x) {
  if (std::isinf(x) && x > 0) return Json{{"finite", false}};
  if (!std::isfinite(x)) throw NumericalError("cannot serialize " + std::to_string(x));
  return x;
}

double real_from_json(const Json& j) {
  if (j.is_object() && j.contains("finite") && !j.at("finite").get<bool>())
    return std::numeric_limits<double>::infinity();
  return number(j, "real");
}

QuadSpec quad_from_json(const Json& j, QuadSpec q) {
  if (j.is_null()) return q;
  if (!j.is_object()) throw ParseError("quad: expected an object");
  for (const auto& [key, v] : j.items()) {
    const std::string where = "quad." + key;
    if (key == "method") {
      const std::string m = v.get<std::string>();
      if (m == "gauss_hermite") q.method = QuadMethod::gauss_hermite;
      else if (m == "monte_carlo") q.method = QuadMethod::monte_carlo;
      else throw ParseError(where + ": unknown method " + m);
    } else if (key == "nodes_per_axis") {
      q.nodes_per_axis = static_cast<int>(number(v, where));
    } else if (key == "samples") {
      q.samples = static_cast<std::uint64_t>(number(v, where));
    } else if (key == "seed") {
      q.seed = static_cast<std::uint64_t>(number(v, where));
    } else if (key == "sup_radius") {
      q.sup_radius = number(v, where);
    } else if (key == "sup_grid") {
      q.sup_grid = static_cast<int>(number(v, where));
    } else if (key == "refine_iters") {
      q.refine_iters = static_cast<int>(number(v, where));
    } else if (key == "allow_closed_form") {
      if (!v.is_boolean()) throw ParseError(where + ": expected a boolean");
      q.allow_closed_form = v.get<bool>();
    } else {
      throw ParseError("quad: unknown key \"" + key + "\"");
    }
  }
  if (q.nodes_per_axis < 0 || q.sup_grid < 0 || q.refine_iters < 0 || q.sup_radius < 0.0)
    throw ParseError("quad: negative setting");
  return q;
}

Json quad_to_json(const QuadSpec& q) {
  return Json{{"method", to_string(q.method)},   {"nodes_per_axis", q.nodes_per_axis},
              {"samples", q.samples},            {"seed", q.seed},
              {"sup_radius", q.sup_radius},      {"sup_grid", q.sup_grid},
              {"refine_iters", q.refine_iters}, {"allow_closed_form", q.allow_closed_form}};
}

WcoProblem problem_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("problem: expected a JSON object");
  const Json& ver = field(j, "version", "problem");
  if (!ver.is_number_integer() || ver.get<int>() != kFormatVersion)
    throw ParseError("problem: unsupported version (expected " + std::to_string(kFormatVersion) + ")");
  const Json& nj = field(j, "n", "problem");
  if (!nj.is_number_integer() || nj.get<long>() < 1 || nj.get<long>() > 8)
    throw ParseError("problem: n must be an integer in [1, 8]");
  const std::size_t n = nj.get<std::size_t>();

  WcoProblem pr;
  pr.p = number(field(j, "p", "problem"), "p");
  pr.q = number(field(j, "q", "problem"), "q");
  if (!(pr.p > 0.0) || !(pr.q > 0.0)) throw ParseError("problem: p and q must be positive");

  const Json& psi = field(j, "psi", "problem");
  if (!psi.is_array() || psi.empty()) throw ParseError("psi: expected a nonempty list of terms");
  std::vector<Term> terms;
  for (std::size_t k = 0; k < psi.size(); ++k) {
    const std::string where = "psi[" + std::to_string(k) + "]";
    Term t;
    t.coeff = complex_of(field(psi[k], "coeff", where), where + ".coeff");
    const Json& pw = field(psi[k], "power", where);
    if (!pw.is_array() || pw.size() != n) throw ParseError(where + ".power: expected " + std::to_string(n) + " integers");
    for (const auto& e : pw) {
      if (!e.is_number_integer() || e.get<int>() < 0) throw ParseError(where + ".power: expected nonnegative integers");
      t.power.push_back(e.get<int>());
    }
    t.freq = psi[k].contains("freq") ? cvector_of(psi[k].at("freq"), n, where + ".freq") : CVector(n, Complex(0.0));
    terms.push_back(std::move(t));
  }
  pr.psi = ExpPoly(n, std::move(terms));

  const Json& phi = field(j, "phi", "problem");
  const Json& a = field(phi, "A", "phi");
  const CVector flat = cvector_of(a, n * n, "phi.A");
  CMatrix m(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) m(r, c) = flat[r * n + c];
  pr.phi = AffineMap(m, cvector_of(field(phi, "b", "phi"), n, "phi.b"));
  pr.quad = quad_from_json(j.contains("quad") ? j.at("quad") : Json());
  if (pr.psi.is_zero()) throw ParseError("psi: all coefficients vanish");
  return pr;
}

Json problem_to_json(const WcoProblem& pr) {
  const std::size_t n = pr.dim();
  Json psi = Json::array();
  for (const auto& t : pr.psi.terms())
    psi.push_back(Json{{"coeff", pair(t.coeff)}, {"power", t.power}, {"freq", pairs(t.freq)}});
  CVector flat;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) flat.push_back(pr.phi.A(r, c));
  return Json{{"version", kFormatVersion}, {"n", n},
              {"p", pr.p},                 {"q", pr.q},
              {"psi", psi},                {"phi", Json{{"A", pairs(flat)}, {"b", pairs(pr.phi.b)}}},
              {"quad", quad_to_json(pr.quad)}};
}

WcoProblem load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  try {
    return problem_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const Error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

Json report_to_json(const Report& r) {
  Json j{{"tool_version", r.tool_version}, {"command", r.command}, {"source", r.source},
         {"verdict", r.verdict},           {"mode", r.mode},       {"certificate", r.certificate},
         {"ell_sup", real_to_json(r.ell_sup)}};
  if (r.bounds) j["bounds"] = bounds_json(*r.bounds);
  if (r.essential) j["essential_bounds"] = bounds_json(*r.essential);
  if (r.oracle) {
    Json o{{"max_degree", r.oracle->max_degree}};
    if (r.oracle->truncated_norm) o["truncated_norm"] = *r.oracle->truncated_norm;
    if (r.oracle->essential_upper) o["essential_upper"] = *r.oracle->essential_upper;
    o["max_quotient"] = r.oracle->max_quotient;
    o["argmax"] = r.oracle->argmax_descriptor;
    j["oracle"] = o;
  }
  if (!r.note.empty()) j["note"] = r.note;
  j["problem"] = r.problem;
  j["quad"] = r.quad;
  return j;
}

Report report_from_json(const Json& j) {
  Report r;
  try {
    r.tool_version = j.at("tool_version").get<std::string>();
    r.command = j.at("command").get<std::string>();
    r.source = j.at("source").get<std::string>();
    r.verdict = j.at("verdict").get<std::string>();
    r.mode = j.at("mode").get<std::string>();
    r.certificate = j.at("certificate").get<std::string>();
    r.ell_sup = real_from_json(j.at("ell_sup"));
    if (j.contains("bounds")) r.bounds = bounds_of(j.at("bounds"));
    if (j.contains("essential_bounds")) r.essential = bounds_of(j.at("essential_bounds"));
    if (j.contains("oracle")) {
      const Json& o = j.at("oracle");
      OracleSection s;
      s.max_degree = o.at("max_degree").get<int>();
      if (o.contains("truncated_norm")) s.truncated_norm = o.at("truncated_norm").get<double>();
      if (o.contains("essential_upper")) s.essential_upper = o.at("essential_upper").get<double>();
      s.max_quotient = o.at("max_quotient").get<double>();
      s.argmax_descriptor = o.at("argmax").get<std::string>();
      r.oracle = s;
    }
    if (j.contains("note")) r.note = j.at("note").get<std::string>();
    r.problem = j.at("problem");
    r.quad = j.at("quad");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report: ") + e.what());
  }
  return r;
}

std::string report_to_text(const Report& r) {
  std::ostringstream o;
  o << r.command << " " << r.source << "\n";
  o << "  verdict      " << r.verdict << " (" << r.mode << ")\n";
  o << "  certificate  " << r.certificate << "\n";
  o << "  ell_sup      " << fixed(r.ell_sup) << "\n";
  if (r.bounds)
    o << "  norm         [" << fixed(r.bounds->lower) << ", " << fixed(r.bounds->upper) << "] " << r.bounds->mode
      << (r.bounds->up_to_constant ? " (upper up to a universal constant)" : "") << "\n";
  if (r.essential)
    o << "  essential    [" << fixed(r.essential->lower) << ", " << fixed(r.essential->upper) << "] "
      << r.essential->mode << "\n";
  if (r.oracle) {
    o << "  oracle       N=" << r.oracle->max_degree;
    if (r.oracle->truncated_norm) o << " truncated_norm=" << fixed(*r.oracle->truncated_norm);
    if (r.oracle->essential_upper) o << " essential_upper=" << fixed(*r.oracle->essential_upper);
    o << " max_quotient=" << fixed(r.oracle->max_quotient) << " at " << r.oracle->argmax_descriptor << "\n";
  }
  if (!r.note.empty()) o << "  note         " << r.note << "\n";
  return o.str();
}

}  // namespace fockop
