#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace berglab {

using Complex = std::complex<double>;

constexpr int kMaxVars = 8;

// Exponent multi-index, zero-padded beyond num_vars.
using Exponents = std::array<std::uint8_t, kMaxVars>;

int exponent_degree(const Exponents& e);

// Graded-lex order with z0 > z1 > ... ; returns true if a > b.
bool graded_lex_greater(const Exponents& a, const Exponents& b);

struct Term {
  Exponents exps{};
  Complex coef{};
};

// Homogeneous polynomial with an exact exponent table. Terms are kept sorted
// in descending graded-lex order and never contain exact-zero coefficients.
class HomogeneousPolynomial {
 public:
  HomogeneousPolynomial() = default;
  HomogeneousPolynomial(int num_vars, int degree) : num_vars_(num_vars), degree_(degree) {}

  // Validates: num_vars in [1, kMaxVars], every exponent tuple sums to degree.
  // Merges duplicate exponent tuples and drops (near-)zero coefficients.
  static HomogeneousPolynomial from_terms(int num_vars, int degree,
                                          std::vector<Term> terms);

  static HomogeneousPolynomial monomial(int num_vars, const Exponents& e,
                                        Complex coef = Complex(1.0, 0.0));

  int num_vars() const { return num_vars_; }
  int degree() const { return degree_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool zero() const { return terms_.empty(); }

  // max |coefficient|; 0 for the zero polynomial.
  double coefficient_scale() const;

  // True when every coefficient has |imag| <= tol * coefficient_scale().
  bool is_real(double tol = 0.0) const;

  Complex eval(const Eigen::VectorXcd& z) const;
  // All first partials at once (cheaper than num_vars eval calls).
  Eigen::VectorXcd eval_gradient(const Eigen::VectorXcd& z) const;

  HomogeneousPolynomial derivative(int var) const;
  HomogeneousPolynomial conjugate_coefficients() const;

  HomogeneousPolynomial operator+(const HomogeneousPolynomial& other) const;
  HomogeneousPolynomial operator-(const HomogeneousPolynomial& other) const;
  HomogeneousPolynomial operator*(Complex scalar) const;
  HomogeneousPolynomial multiply(const HomogeneousPolynomial& other) const;

  // Remainder of division by F (single-divisor multivariate division in
  // graded-lex order). The result has no term divisible by the leading
  // monomial of F and agrees with *this on the locus F = 0.
  HomogeneousPolynomial reduce_mod(const HomogeneousPolynomial& F) const;

  bool same_support(const HomogeneousPolynomial& other) const;
  Complex coefficient(const Exponents& e) const;

 private:
  int num_vars_ = 0;
  int degree_ = 0;
  std::vector<Term> terms_;
};

// Text format: comment lines starting with '#', then
//   num_vars <n>
//   degree <d>
//   term <e0> ... <e_{n-1}> <re> <im>
HomogeneousPolynomial parse_polynomial(std::istream& in);
HomogeneousPolynomial load_polynomial(const std::string& path);
void write_polynomial(std::ostream& out, const HomogeneousPolynomial& p);
void save_polynomial(const std::string& path, const HomogeneousPolynomial& p);

// Stock hypersurfaces used by the bundled experiments and tests.
HomogeneousPolynomial fermat(int num_vars, int degree, double last_sign = 1.0);

}  // namespace berglab
