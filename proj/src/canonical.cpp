#include "berglab/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Dense>
#include <json.hpp>

#include "berglab/errors.hpp"

namespace berglab {

namespace {

long long binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  long long r = 1;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

// All exponent tuples of total degree `degree` in `num_vars` variables,
// descending graded-lex.
void enumerate_monomials(int num_vars, int degree, int var, Exponents cur, int left,
                         std::vector<Exponents>& out) {
  if (var == num_vars - 1) {
    cur[var] = static_cast<std::uint8_t>(left);
    out.push_back(cur);
    return;
  }
  for (int e = left; e >= 0; --e) {
    cur[var] = static_cast<std::uint8_t>(e);
    enumerate_monomials(num_vars, degree, var + 1, cur, left - e, out);
  }
}

bool divisible(const Exponents& m, const Exponents& by) {
  for (int j = 0; j < kMaxVars; ++j)
    if (m[j] < by[j]) return false;
  return true;
}

}  // namespace

int canonical_rep_degree(const HomogeneousPolynomial& F, int m) {
  if (m < 1) throw ValidationError("canonical power m must be >= 1");
  int n = F.num_vars() - 1;  // projective dimension
  int excess = F.degree() - (n + 1);
  if (excess <= 0)
    throw ValidationError("canonical bundle not positive: degree " +
                          std::to_string(F.degree()) + " <= n+1 = " + std::to_string(n + 1));
  return m * excess;
}

int expected_section_dimension(const HomogeneousPolynomial& F, int m) {
  int n = F.num_vars() - 1;
  int D = canonical_rep_degree(F, m);
  return static_cast<int>(binomial(D + n, n) - binomial(D - F.degree() + n, n));
}

SectionBasis section_space_basis(const HomogeneousPolynomial& F, int m) {
  int D = canonical_rep_degree(F, m);
  std::vector<Exponents> monos;
  enumerate_monomials(F.num_vars(), D, 0, Exponents{}, D, monos);
  const Exponents lead = F.terms().front().exps;
  SectionBasis basis;
  basis.m = m;
  for (const auto& e : monos) {
    if (D >= F.degree() && divisible(e, lead)) continue;
    basis.sections.push_back({m, HomogeneousPolynomial::monomial(F.num_vars(), e)});
  }
  if (basis.dimension() != expected_section_dimension(F, m))
    throw NumericalError("section basis size does not match the cohomology count");
  return basis;
}

LocalFrame default_frame(const HomogeneousPolynomial& F, const ProjectivePoint& pt) {
  FramePlan plan = plan_frame(F, pt);
  return {plan.chart, plan.solved};
}

Complex evaluate_section(const CanonicalSection& s, const HomogeneousPolynomial& F,
                         const ProjectivePoint& pt, const LocalFrame& frame) {
  if (s.rep.num_vars() != pt.num_vars())
    throw ValidationError("evaluate_section: dimension mismatch");
  Complex zc = pt.z[frame.chart];
  if (std::abs(zc) < 1e-3)
    throw ChartError("evaluate_section: chart coordinate too small, switch charts");
  Eigen::VectorXcd grad = F.eval_gradient(pt.z);
  double scale = F.degree() * std::max(F.coefficient_scale(), 1e-300);
  if (std::abs(grad[frame.solved]) <= kSingularGradientTol * scale)
    throw ChartError("evaluate_section: residue frame degenerate, switch charts");
  Complex val = s.rep.eval(pt.z);
  return val / std::pow(zc, s.rep.degree());
}

Complex frame_pairing(const HomogeneousPolynomial& F, const LocalFrame& frame,
                      const Eigen::VectorXcd& z, const Eigen::MatrixXcd& vectors) {
  const int nv = static_cast<int>(z.size());
  const int q = nv - 2;
  if (vectors.cols() != q)
    throw ValidationError("frame_pairing: expected one vector per hypersurface dimension");
  Complex zc = z[frame.chart];
  if (std::abs(zc) < 1e-300) throw ChartError("frame_pairing: zero chart coordinate");
  Eigen::VectorXcd grad = F.eval_gradient(z);
  Complex gs = grad[frame.solved];
  if (std::abs(gs) < 1e-300) throw ChartError("frame_pairing: degenerate residue direction");

  // du_j(v) = (v_j z_c - z_j v_c) / z_c^2 over the free indices, then the
  // signed residue frame: (-1)^{chart + rho(solved)} det[du_j(v_k)] * z_c^{d-1} / dF_s
  std::vector<int> free;
  int rho = 0;
  for (int j = 0; j < nv; ++j) {
    if (j == frame.chart) continue;
    if (j == frame.solved) {
      rho = static_cast<int>(free.size());
      continue;
    }
    free.push_back(j);
  }
  Eigen::MatrixXcd du(q, q);
  for (int r = 0; r < q; ++r)
    for (int k = 0; k < q; ++k)
      du(r, k) = (vectors(free[r], k) * zc - z[free[r]] * vectors(frame.chart, k)) / (zc * zc);
  Complex det = q == 0 ? Complex(1.0, 0.0) : du.determinant();
  double sign = ((frame.chart + rho) % 2 == 0) ? 1.0 : -1.0;
  return sign * det * std::pow(zc, F.degree() - 1) / gs;
}

double frame_h_norm_sq(const HomogeneousPolynomial& F, const LocalFrame& frame,
                       const ProjectivePoint& pt, const BaseMetric& g) {
  FramePlan plan;
  plan.chart = frame.chart;
  plan.solved = frame.solved;
  plan.gradient = F.eval_gradient(pt.z);
  if (std::abs(plan.gradient[frame.solved]) < 1e-300)
    throw ChartError("frame_h_norm_sq: degenerate residue direction");
  Eigen::MatrixXcd basis = adapted_tangent_basis(plan, pt.z);
  const int q = static_cast<int>(basis.cols());
  Eigen::MatrixXcd gram(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      gram(i, j) = fs_inner(basis.col(i), basis.col(j), pt.z);
  double det_g = gram.determinant().real();
  if (!(det_g > 0.0)) throw NumericalError("frame_h_norm_sq: restricted metric not positive");
  Complex omega = frame_pairing(F, frame, pt.z, basis);
  double fs_part = std::norm(omega) / det_g;
  return fs_part * std::exp(-q * g.log_factor(pt.z));
}

double section_norm_g(const CanonicalSection& s, const HomogeneousPolynomial& F,
                      const ProjectivePoint& pt, const BaseMetric& g) {
  LocalFrame frame = default_frame(F, pt);
  Complex a = evaluate_section(s, F, pt, frame);
  double w = frame_h_norm_sq(F, frame, pt, g);
  return std::abs(a) * std::pow(w, 0.5 * s.m);
}

CanonicalSection sigma_pullback(const CanonicalSection& s) {
  return {s.m, s.rep.conjugate_coefficients()};
}

double divisor_proximity(const CanonicalSection& s, const ProjectivePoint& pt) {
  if (s.rep.zero()) return 0.0;
  Complex val(0.0, 0.0);
  double norm_sq = 0.0;
  for (const auto& t : s.rep.terms()) {
    Complex mono(1.0, 0.0);
    for (int j = 0; j < s.rep.num_vars(); ++j)
      for (int e = 0; e < t.exps[j]; ++e) mono *= pt.z[j];
    Complex contrib = t.coef * mono;
    val += contrib;
    norm_sq += std::norm(contrib);
  }
  if (!(norm_sq > 0.0)) return 0.0;
  return std::abs(val) / std::sqrt(norm_sq);
}

void save_basis(const std::string& path, const SectionBasis& basis) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write basis file: " + path);
  nlohmann::json manifest;
  manifest["m"] = basis.m;
  manifest["dimension"] = basis.dimension();
  manifest["orthonormal"] = basis.orthonormal;
  manifest["gram_residual"] = basis.gram_residual;
  out << "# " << manifest.dump() << "\n";
  for (std::size_t i = 0; i < basis.sections.size(); ++i) {
    if (i) out << "---\n";
    write_polynomial(out, basis.sections[i].rep);
  }
}

SectionBasis load_basis(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open basis file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.empty() || line[0] != '#')
    throw ValidationError("basis file missing JSON manifest: " + path);
  nlohmann::json manifest = nlohmann::json::parse(line.substr(1));
  SectionBasis basis;
  basis.m = manifest.at("m").get<int>();
  basis.orthonormal = manifest.at("orthonormal").get<bool>();
  basis.gram_residual = manifest.at("gram_residual").get<double>();
  int dim = manifest.at("dimension").get<int>();
  for (int i = 0; i < dim; ++i)
    basis.sections.push_back({basis.m, parse_polynomial(in)});
  return basis;
}

}  // namespace berglab
