#include <doctest.h>

#include <sstream>

#include "berglab/errors.hpp"
#include "berglab/poly.hpp"
#include "berglab/rng.hpp"

using namespace berglab;

namespace {

Eigen::VectorXcd vec3(Complex a, Complex b, Complex c) {
  Eigen::VectorXcd v(3);
  v << a, b, c;
  return v;
}

}  // namespace

TEST_CASE("quartic evaluation at pinned points") {
  HomogeneousPolynomial F = fermat(3, 4, -1.0);  // x^4 + y^4 - z^4
  CHECK(std::abs(F.eval(vec3(1, 0, 1))) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(F.eval(vec3(1, 1, 1)).real() == doctest::Approx(1.0));
  CHECK(F.eval(vec3(Complex(0, 1), 1, 0)).real() == doctest::Approx(2.0));  // i^4 = 1
  CHECK(F.eval(vec3(Complex(0, 1), 1, 0)).imag() == doctest::Approx(0.0));
}

TEST_CASE("eval rejects dimension mismatch") {
  HomogeneousPolynomial F = fermat(3, 4, -1.0);
  Eigen::VectorXcd bad(4);
  bad.setOnes();
  CHECK_THROWS_AS(F.eval(bad), ValidationError);
}

TEST_CASE("homogeneity under random rescaling") {
  Rng rng(42);
  HomogeneousPolynomial F = fermat(4, 5);  // quintic surface polynomial
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXcd z(4);
    for (int j = 0; j < 4; ++j) z[j] = rng.complex_gaussian();
    Complex lambda = rng.complex_gaussian();
    if (std::abs(lambda) < 0.1) continue;
    Complex lhs = F.eval((lambda * z).eval());
    Complex rhs = std::pow(lambda, F.degree()) * F.eval(z);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs));
  }
}

TEST_CASE("gradient matches finite differences") {
  Rng rng(7);
  HomogeneousPolynomial F = fermat(3, 4, -1.0);
  Eigen::VectorXcd z(3);
  for (int j = 0; j < 3; ++j) z[j] = rng.complex_gaussian();
  Eigen::VectorXcd g = F.eval_gradient(z);
  double h = 1e-6;
  for (int j = 0; j < 3; ++j) {
    Eigen::VectorXcd zp = z, zm = z;
    zp[j] += h;
    zm[j] -= h;
    Complex fd = (F.eval(zp) - F.eval(zm)) / (2.0 * h);
    CHECK(std::abs(fd - g[j]) < 1e-7);
    CHECK(std::abs(F.derivative(j).eval(z) - g[j]) < 1e-12);
  }
}

TEST_CASE("reduction mod F preserves values on the locus") {
  HomogeneousPolynomial F = fermat(3, 4, -1.0);
  // P = x^6 + q*F for a random-ish q of degree 2; remainder must agree on F=0
  Exponents e{};
  e[0] = 6;
  HomogeneousPolynomial P = HomogeneousPolynomial::monomial(3, e);
  Exponents q2{};
  q2[0] = 1;
  q2[1] = 1;
  HomogeneousPolynomial Q = HomogeneousPolynomial::monomial(3, q2, Complex(0.7, 0.0));
  HomogeneousPolynomial sum = P + Q.multiply(F);
  HomogeneousPolynomial red = sum.reduce_mod(F);
  // no term of the remainder is divisible by x^4
  for (const auto& t : red.terms()) CHECK(t.exps[0] < 4);
  // same values at points of the curve (z = 1 chart, solve for y)
  // point (1, 0, 1) lies on the curve
  Eigen::VectorXcd pt = vec3(1, 0, 1);
  CHECK(std::abs(red.eval(pt) - sum.eval(pt)) < 1e-12);
  CHECK(std::abs(red.eval(pt) - P.eval(pt)) < 1e-12);
}

TEST_CASE("polynomial text round trip and reality flag") {
  HomogeneousPolynomial F = fermat(3, 4, -1.0);
  std::stringstream ss;
  write_polynomial(ss, F);
  HomogeneousPolynomial back = parse_polynomial(ss);
  CHECK(back.same_support(F));
  CHECK(back.is_real(0.0));
  CHECK(back.degree() == 4);
  CHECK(back.num_vars() == 3);

  std::stringstream bad("num_vars 3\ndegree 2\nterm 1 0 0 1 0\n");
  CHECK_THROWS_AS(parse_polynomial(bad), ValidationError);  // degree mismatch
}

TEST_CASE("sigma action on coefficients is an involution") {
  std::vector<Term> terms;
  Term t;
  t.exps[0] = 2;
  t.coef = Complex(1.0, 2.0);
  terms.push_back(t);
  Term u;
  u.exps[1] = 2;
  u.coef = Complex(0.0, -1.0);
  terms.push_back(u);
  HomogeneousPolynomial p = HomogeneousPolynomial::from_terms(3, 2, terms);
  CHECK(!p.is_real(1e-14));
  HomogeneousPolynomial pc = p.conjugate_coefficients();
  CHECK(pc.conjugate_coefficients().same_support(p));
  CHECK(std::abs(pc.coefficient(t.exps) - std::conj(t.coef)) == 0.0);
}
