#include "berglab/poly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "berglab/errors.hpp"

namespace berglab {

namespace {

constexpr double kDropTol = 0.0;  // exact zeros only; callers clean up noise

void check_var_count(int num_vars) {
  if (num_vars < 1 || num_vars > kMaxVars)
    throw ValidationError("num_vars out of range [1, " + std::to_string(kMaxVars) + "]");
}

}  // namespace

int exponent_degree(const Exponents& e) {
  int d = 0;
  for (auto v : e) d += v;
  return d;
}

bool graded_lex_greater(const Exponents& a, const Exponents& b) {
  int da = exponent_degree(a), db = exponent_degree(b);
  if (da != db) return da > db;
  return a > b;  // lexicographic on the padded array, z0 first
}

HomogeneousPolynomial HomogeneousPolynomial::from_terms(int num_vars, int degree,
                                                        std::vector<Term> terms) {
  check_var_count(num_vars);
  if (degree < 0) throw ValidationError("degree must be nonnegative");
  for (const auto& t : terms) {
    for (int j = num_vars; j < kMaxVars; ++j)
      if (t.exps[j] != 0) throw ValidationError("exponent set beyond num_vars");
    if (exponent_degree(t.exps) != degree)
      throw ValidationError("term degree does not match polynomial degree");
  }
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
    return graded_lex_greater(a.exps, b.exps);
  });
  HomogeneousPolynomial p(num_vars, degree);
  for (const auto& t : terms) {
    if (!p.terms_.empty() && p.terms_.back().exps == t.exps)
      p.terms_.back().coef += t.coef;
    else
      p.terms_.push_back(t);
  }
  p.terms_.erase(std::remove_if(p.terms_.begin(), p.terms_.end(),
                                [](const Term& t) { return std::abs(t.coef) <= kDropTol; }),
                 p.terms_.end());
  return p;
}

HomogeneousPolynomial HomogeneousPolynomial::monomial(int num_vars, const Exponents& e,
                                                      Complex coef) {
  return from_terms(num_vars, exponent_degree(e), {Term{e, coef}});
}

double HomogeneousPolynomial::coefficient_scale() const {
  double s = 0.0;
  for (const auto& t : terms_) s = std::max(s, std::abs(t.coef));
  return s;
}

bool HomogeneousPolynomial::is_real(double tol) const {
  double bound = tol * coefficient_scale();
  for (const auto& t : terms_)
    if (std::abs(t.coef.imag()) > bound) return false;
  return true;
}

Complex HomogeneousPolynomial::eval(const Eigen::VectorXcd& z) const {
  if (z.size() != num_vars_)
    throw ValidationError("eval: point dimension " + std::to_string(z.size()) +
                          " != num_vars " + std::to_string(num_vars_));
  Complex acc(0.0, 0.0);
  for (const auto& t : terms_) {
    Complex m = t.coef;
    for (int j = 0; j < num_vars_; ++j) {
      Complex zj = z[j];
      int e = t.exps[j];
      while (e >= 2) {  // small exponents; plain repeated squaring
        if (e & 1) m *= zj;
        zj *= zj;
        e >>= 1;
      }
      if (e) m *= zj;
    }
    acc += m;
  }
  return acc;
}

Eigen::VectorXcd HomogeneousPolynomial::eval_gradient(const Eigen::VectorXcd& z) const {
  if (z.size() != num_vars_) throw ValidationError("eval_gradient: dimension mismatch");
  Eigen::VectorXcd g = Eigen::VectorXcd::Zero(num_vars_);
  for (const auto& t : terms_) {
    // powers z_j^{e_j} once, then per-variable quotient rule
    std::array<Complex, kMaxVars> pow{};
    Complex full = t.coef;
    for (int j = 0; j < num_vars_; ++j) {
      Complex pj(1.0, 0.0);
      for (int e = 0; e < t.exps[j]; ++e) pj *= z[j];
      pow[j] = pj;
      full *= pj;
    }
    for (int j = 0; j < num_vars_; ++j) {
      int e = t.exps[j];
      if (e == 0) continue;
      Complex rest = t.coef;
      for (int k = 0; k < num_vars_; ++k)
        if (k != j) rest *= pow[k];
      Complex pj(1.0, 0.0);
      for (int q = 0; q < e - 1; ++q) pj *= z[j];
      g[j] += static_cast<double>(e) * rest * pj;
    }
  }
  return g;
}

HomogeneousPolynomial HomogeneousPolynomial::derivative(int var) const {
  if (var < 0 || var >= num_vars_) throw ValidationError("derivative: bad variable index");
  std::vector<Term> out;
  for (const auto& t : terms_) {
    if (t.exps[var] == 0) continue;
    Term s = t;
    s.coef *= static_cast<double>(t.exps[var]);
    s.exps[var] -= 1;
    out.push_back(s);
  }
  return from_terms(num_vars_, std::max(degree_ - 1, 0), std::move(out));
}

HomogeneousPolynomial HomogeneousPolynomial::conjugate_coefficients() const {
  std::vector<Term> out = terms_;
  for (auto& t : out) t.coef = std::conj(t.coef);
  return from_terms(num_vars_, degree_, std::move(out));
}

HomogeneousPolynomial HomogeneousPolynomial::operator+(const HomogeneousPolynomial& o) const {
  if (num_vars_ != o.num_vars_ || degree_ != o.degree_)
    throw ValidationError("polynomial sum: shape mismatch");
  std::vector<Term> all = terms_;
  all.insert(all.end(), o.terms_.begin(), o.terms_.end());
  return from_terms(num_vars_, degree_, std::move(all));
}

HomogeneousPolynomial HomogeneousPolynomial::operator-(const HomogeneousPolynomial& o) const {
  return *this + o * Complex(-1.0, 0.0);
}

HomogeneousPolynomial HomogeneousPolynomial::operator*(Complex scalar) const {
  std::vector<Term> out = terms_;
  for (auto& t : out) t.coef *= scalar;
  return from_terms(num_vars_, degree_, std::move(out));
}

HomogeneousPolynomial HomogeneousPolynomial::multiply(const HomogeneousPolynomial& o) const {
  if (num_vars_ != o.num_vars_) throw ValidationError("polynomial product: num_vars mismatch");
  std::vector<Term> out;
  out.reserve(terms_.size() * o.terms_.size());
  for (const auto& a : terms_)
    for (const auto& b : o.terms_) {
      Term t;
      for (int j = 0; j < kMaxVars; ++j)
        t.exps[j] = static_cast<std::uint8_t>(a.exps[j] + b.exps[j]);
      t.coef = a.coef * b.coef;
      out.push_back(t);
    }
  return from_terms(num_vars_, degree_ + o.degree_, std::move(out));
}

HomogeneousPolynomial HomogeneousPolynomial::reduce_mod(const HomogeneousPolynomial& F) const {
  if (F.zero()) throw ValidationError("reduce_mod: zero divisor");
  if (num_vars_ != F.num_vars_) throw ValidationError("reduce_mod: num_vars mismatch");
  if (degree_ < F.degree_ || zero()) return *this;
  const Term& lead = F.terms_.front();
  HomogeneousPolynomial r = *this;
  for (;;) {
    // leading reducible term (terms are sorted, so scan in order)
    std::size_t idx = r.terms_.size();
    Exponents diff{};
    for (std::size_t i = 0; i < r.terms_.size(); ++i) {
      bool divisible = true;
      for (int j = 0; j < num_vars_; ++j) {
        if (r.terms_[i].exps[j] < lead.exps[j]) {
          divisible = false;
          break;
        }
        diff[j] = static_cast<std::uint8_t>(r.terms_[i].exps[j] - lead.exps[j]);
      }
      if (divisible) {
        idx = i;
        break;
      }
    }
    if (idx == r.terms_.size()) return r;
    Complex q = r.terms_[idx].coef / lead.coef;
    HomogeneousPolynomial sub =
        monomial(num_vars_, diff, q).multiply(F);
    r = r - sub;
  }
}

bool HomogeneousPolynomial::same_support(const HomogeneousPolynomial& o) const {
  if (terms_.size() != o.terms_.size()) return false;
  for (std::size_t i = 0; i < terms_.size(); ++i)
    if (terms_[i].exps != o.terms_[i].exps) return false;
  return true;
}

Complex HomogeneousPolynomial::coefficient(const Exponents& e) const {
  for (const auto& t : terms_)
    if (t.exps == e) return t.coef;
  return Complex(0.0, 0.0);
}

HomogeneousPolynomial parse_polynomial(std::istream& in) {
  int num_vars = -1, degree = -1;
  std::vector<Term> terms;
  std::string line;
  while (std::getline(in, line)) {
    if (line == "---") break;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (key == "num_vars") {
      if (!(ls >> num_vars)) throw ValidationError("polynomial parse: bad num_vars");
    } else if (key == "degree") {
      if (!(ls >> degree)) throw ValidationError("polynomial parse: bad degree");
    } else if (key == "term") {
      if (num_vars < 0) throw ValidationError("polynomial parse: term before num_vars");
      Term t;
      for (int j = 0; j < num_vars; ++j) {
        int e;
        if (!(ls >> e) || e < 0 || e > 255)
          throw ValidationError("polynomial parse: bad exponent");
        t.exps[j] = static_cast<std::uint8_t>(e);
      }
      double re, im;
      if (!(ls >> re >> im)) throw ValidationError("polynomial parse: bad coefficient");
      t.coef = Complex(re, im);
      terms.push_back(t);
    } else {
      throw ValidationError("polynomial parse: unknown key '" + key + "'");
    }
  }
  if (num_vars < 0 || degree < 0)
    throw ValidationError("polynomial parse: missing num_vars or degree");
  return HomogeneousPolynomial::from_terms(num_vars, degree, std::move(terms));
}

HomogeneousPolynomial load_polynomial(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open polynomial file: " + path);
  return parse_polynomial(in);
}

void write_polynomial(std::ostream& out, const HomogeneousPolynomial& p) {
  out << "num_vars " << p.num_vars() << "\n";
  out << "degree " << p.degree() << "\n";
  char buf[64];
  for (const auto& t : p.terms()) {
    out << "term";
    for (int j = 0; j < p.num_vars(); ++j) out << ' ' << static_cast<int>(t.exps[j]);
    std::snprintf(buf, sizeof buf, " %.17g %.17g", t.coef.real(), t.coef.imag());
    out << buf << "\n";
  }
}

void save_polynomial(const std::string& path, const HomogeneousPolynomial& p) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write polynomial file: " + path);
  write_polynomial(out, p);
}

HomogeneousPolynomial fermat(int num_vars, int degree, double last_sign) {
  std::vector<Term> terms;
  for (int j = 0; j < num_vars; ++j) {
    Term t;
    t.exps[j] = static_cast<std::uint8_t>(degree);
    t.coef = Complex(j + 1 == num_vars ? last_sign : 1.0, 0.0);
    terms.push_back(t);
  }
  return HomogeneousPolynomial::from_terms(num_vars, degree, std::move(terms));
}

}  // namespace berglab
