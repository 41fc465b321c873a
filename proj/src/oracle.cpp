#include "fockop/oracle.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <unordered_map>
#include <sstream>

#include "fockop/errors.hpp"

namespace fockop {

namespace {

void require_f2(const WcoProblem& problem) {
  problem.validate();
  if (problem.p != 2.0 || problem.q != 2.0) throw DomainError("the F^2 matrix oracle requires p = q = 2");
}

double log_factorial(const MultiIndex& a) {
  double s = 0.0;
  for (int k : a) s += std::lgamma(k + 1.0);
  return s;
}

std::size_t basis_size(std::size_t n, int degree) {
  double c = 1.0;
  for (std::size_t k = 1; k <= n; ++k) c = c * (degree + static_cast<double>(k)) / static_cast<double>(k);
  return static_cast<std::size_t>(std::llround(c));
}

struct IndexHash {
  std::size_t operator()(const MultiIndex& a) const {
    std::size_t h = 1469598103934665603ULL;
    for (int k : a) h = (h ^ static_cast<std::size_t>(k)) * 1099511628211ULL;
    return h;
  }
};

// Dense coefficient arrays over the monomials of degree <= M.
struct Graded {
  std::vector<MultiIndex> basis;
  std::unordered_map<MultiIndex, int, IndexHash> index;
  std::vector<std::vector<int>> up;  // index of beta + e_i, or -1 past degree M

  Graded(std::size_t n, int m) : basis(monomial_basis(n, m)) {
    for (std::size_t k = 0; k < basis.size(); ++k) index.emplace(basis[k], static_cast<int>(k));
    up.assign(basis.size(), std::vector<int>(n, -1));
    for (std::size_t k = 0; k < basis.size(); ++k)
      for (std::size_t i = 0; i < n; ++i) {
        MultiIndex b = basis[k];
        ++b[i];
        const auto it = index.find(b);
        if (it != index.end()) up[k][i] = it->second;
      }
  }
};

// Taylor coefficients of an exp-poly up to degree M.
std::vector<Complex> taylor_series(const ExpPoly& g, const Graded& gr) {
  std::vector<Complex> out(gr.basis.size(), Complex(0.0));
  for (std::size_t k = 0; k < gr.basis.size(); ++k) {
    const MultiIndex& beta = gr.basis[k];
    for (const auto& t : g.terms()) {
      Complex v = t.coeff;
      for (std::size_t i = 0; i < beta.size(); ++i) {
        const int e = beta[i] - t.power[i];
        if (e < 0) {
          v = 0.0;
          break;
        }
        if (e > 0) v *= std::pow(std::conj(t.freq[i]), e) / std::tgamma(e + 1.0);
      }
      out[k] += v;
    }
  }
  return out;
}

std::string fmt(double x) {
  std::ostringstream o;
  o.precision(6);
  o << x;
  return o.str();
}

std::string fmt(const CVector& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt(v[i].real());
    if (v[i].imag() != 0.0) out += (v[i].imag() < 0 ? "-" : "+") + fmt(std::abs(v[i].imag())) + "i";
  }
  return out + ")";
}

}  // namespace

std::vector<MultiIndex> monomial_basis(std::size_t n, int degree) {
  std::vector<MultiIndex> out;
  for (int d = 0; d <= degree; ++d) {
    MultiIndex a(n, 0);
    std::function<void(std::size_t, int)> fill = [&](std::size_t i, int left) {
      if (i + 1 == n) {
        a[i] = left;
        out.push_back(a);
        return;
      }
      for (int k = left; k >= 0; --k) {
        a[i] = k;
        fill(i + 1, left - k);
      }
    };
    if (n == 0) break;
    fill(0, d);
  }
  return out;
}

Eigen::MatrixXcd f2_block(const WcoProblem& problem, int row_degree, int col_min, int col_max) {
  require_f2(problem);
  const std::size_t n = problem.dim();
  const int m = std::max(row_degree, col_max);
  if (basis_size(n, m) > kMaxBasis)
    throw ResourceError("F^2 truncation basis exceeds " + std::to_string(kMaxBasis) + " monomials");
  const Graded gr(n, m);
  const std::size_t size = gr.basis.size();

  // Columns (Az + b)^alpha, each from its parent alpha - e_i times (Az + b)_i.
  std::vector<std::vector<Complex>> powers(size);
  powers[0].assign(size, Complex(0.0));
  powers[0][0] = 1.0;
  for (std::size_t k = 1; k < size; ++k) {
    const MultiIndex& a = gr.basis[k];
    std::size_t i = 0;
    while (a[i] == 0) ++i;
    MultiIndex parent = a;
    --parent[i];
    const auto& src = powers[static_cast<std::size_t>(gr.index.at(parent))];
    std::vector<Complex> dst(size, Complex(0.0));
    for (std::size_t r = 0; r < size; ++r) {
      if (src[r] == Complex(0.0)) continue;
      dst[r] += src[r] * problem.phi.b[i];
      for (std::size_t j = 0; j < n; ++j)
        if (gr.up[r][j] >= 0) dst[static_cast<std::size_t>(gr.up[r][j])] += src[r] * problem.phi.A(i, j);
    }
    powers[k] = std::move(dst);
  }

  const bool plain = problem.psi.terms().size() == 1 && problem.psi.max_degree() == 0 &&
                     norm(problem.psi.terms()[0].freq) == 0.0;
  std::vector<Complex> psi;
  std::vector<std::vector<int>> sum;
  if (plain) {
    psi.assign(1, problem.psi.terms()[0].coeff);
  } else {
    psi = taylor_series(problem.psi, gr);
    sum.assign(size, std::vector<int>(size, -1));
    for (std::size_t g = 0; g < size; ++g) {
      if (psi[g] == Complex(0.0)) continue;
      for (std::size_t d = 0; d < size; ++d) {
        if (total_degree(gr.basis[g]) + total_degree(gr.basis[d]) > m) continue;
        MultiIndex b = gr.basis[g];
        for (std::size_t i = 0; i < n; ++i) b[i] += gr.basis[d][i];
        sum[g][d] = gr.index.at(b);
      }
    }
  }

  std::vector<std::size_t> rows, cols;
  for (std::size_t k = 0; k < size; ++k) {
    const int deg = total_degree(gr.basis[k]);
    if (deg <= row_degree) rows.push_back(k);
    if (deg >= col_min && deg <= col_max) cols.push_back(k);
  }
  std::vector<double> half_lf(size);
  for (std::size_t k = 0; k < size; ++k) half_lf[k] = 0.5 * log_factorial(gr.basis[k]);

  Eigen::MatrixXcd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  std::vector<Complex> image(size);
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const auto& v = powers[cols[c]];
    if (plain) {
      for (std::size_t r = 0; r < size; ++r) image[r] = psi[0] * v[r];
    } else {
      std::fill(image.begin(), image.end(), Complex(0.0));
      for (std::size_t g = 0; g < size; ++g) {
        if (psi[g] == Complex(0.0)) continue;
        for (std::size_t d = 0; d < size; ++d)
          if (sum[g][d] >= 0 && v[d] != Complex(0.0)) image[static_cast<std::size_t>(sum[g][d])] += psi[g] * v[d];
      }
    }
    for (std::size_t r = 0; r < rows.size(); ++r)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          image[rows[r]] * std::exp(half_lf[rows[r]] - half_lf[cols[c]]);
  }
  return out;
}

Eigen::MatrixXcd f2_matrix(const WcoProblem& problem, const TruncationSpec& spec) {
  if (spec.max_degree < 0) throw DomainError("max_degree must be nonnegative");
  return f2_block(problem, spec.max_degree, 0, spec.max_degree);
}

double truncated_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::BDCSVD<Eigen::MatrixXcd>(m).singularValues()(0);
}

double truncated_essential_upper(const WcoProblem& problem, int max_degree, const QuadSpec&, int extra) {
  if (max_degree < 0 || extra < 0) throw DomainError("truncated_essential_upper: bad degrees");
  if (extra == 0) extra = 8;
  const int top = max_degree + extra;
  return truncated_norm(f2_block(problem, top, max_degree + 1, top));
}

ExpPoly apply_to_kernel(const WcoProblem& problem, std::span<const Complex> w) {
  const CVector wv(w.begin(), w.end());
  const Complex scale = std::exp(inner(problem.phi.b, wv) - 0.5 * norm_sq(wv));
  return multiply(problem.psi, kernel(problem.phi.A.adjoint().apply(wv))).scaled(scale);
}

std::vector<RayleighSample> rayleigh_sweep(const WcoProblem& problem, const FamilySpec& family) {
  problem.validate();
  const std::size_t n = problem.dim();
  std::vector<RayleighSample> out;
  const auto kernel_sample = [&](const std::string& label, const CVector& w) {
    const NormResult r = fock_norm(apply_to_kernel(problem, w), problem.q, problem.quad);
    out.push_back({label + " w=" + fmt(w), r.value, r.err_estimate});
  };
  for (const auto& d : ray_directions(n, family.extra_directions, family.seed))
    for (double t : family.radii) {
      CVector w(n);
      for (std::size_t i = 0; i < n; ++i) w[i] = t * d[i];
      kernel_sample("k_w", w);
    }
  for (const auto& a : monomial_basis(n, family.monomial_degree)) {
    const ExpPoly f = ExpPoly::monomial(n, 1.0, a);
    const NormResult top = fock_norm(multiply(problem.psi, compose_affine(f, problem.phi)), problem.q, problem.quad);
    const NormResult bottom = fock_norm(f, problem.p, problem.quad);
    std::string label = "z^(";
    for (std::size_t i = 0; i < n; ++i) label += (i ? "," : "") + std::to_string(a[i]);
    out.push_back({label + ")", top.value / bottom.value,
                   (top.err_estimate + top.value * bottom.err_estimate / bottom.value) / bottom.value});
  }
  for (const auto& z : family.phi_points) {
    if (z.size() != n) throw DimensionError("rayleigh_sweep: phi point has the wrong dimension");
    kernel_sample("k_phi(z)", problem.phi(z));
  }
  return out;
}

WitnessTable compactness_witness(const WcoProblem& problem, const std::vector<double>& radii,
                                 const std::vector<CVector>& directions) {
  problem.validate();
  WitnessTable t{radii, directions, {}, true};
  for (const auto& d : directions) {
    if (d.size() != problem.dim()) throw DimensionError("compactness_witness: direction has the wrong dimension");
    std::vector<double> row;
    for (double r : radii) {
      CVector w(d.size());
      for (std::size_t i = 0; i < d.size(); ++i) w[i] = r * d[i];
      row.push_back(fock_norm(apply_to_kernel(problem, w), problem.q, problem.quad).value);
    }
    for (std::size_t k = 1; k < row.size(); ++k)
      if (row[k] > row[k - 1] * (1.0 + 1e-12)) t.monotone_decay = false;
    t.values.push_back(std::move(row));
  }
  return t;
}

}  // namespace fockop
