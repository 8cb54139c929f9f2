#include <doctest.h>

#include "berglab/errors.hpp"
#include "berglab/projective.hpp"
#include "berglab/rng.hpp"

using namespace berglab;

namespace {

ProjectivePoint random_point(Rng& rng, int n) {
  Eigen::VectorXcd z(n);
  for (int j = 0; j < n; ++j) z[j] = rng.complex_gaussian();
  return make_point(std::move(z));
}

// a point of the Fermat quartic with both free coordinates generic
ProjectivePoint quartic_point(Complex x, Complex y) {
  Eigen::VectorXcd z(3);
  Complex z4 = x * x * x * x + y * y * y * y;
  z << x, y, std::pow(z4, 0.25);
  return make_point(std::move(z));
}

}  // namespace

TEST_CASE("canonical gauge and chart invariants") {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    ProjectivePoint pt = random_point(rng, 3);
    CHECK(pt.z.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(pt.z[pt.chart]) >= 1.0 / std::sqrt(3.0) - 1e-12);
    CHECK(pt.z[pt.chart].imag() == 0.0);
    CHECK(pt.z[pt.chart].real() > 0.0);
  }
}

TEST_CASE("conjugation is an involution and fixes real points") {
  ProjectivePoint a = make_point((Eigen::VectorXcd(3) << Complex(1, 0), Complex(0, 1),
                                  Complex(0, 0)).finished());
  ProjectivePoint ca = conjugation(a);
  CHECK(ca.z[1].imag() == doctest::Approx(-a.z[1].imag()));

  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    ProjectivePoint pt = random_point(rng, 4);
    ProjectivePoint twice = conjugation(conjugation(pt));
    CHECK((twice.z - pt.z).norm() < 1e-14);
  }
  ProjectivePoint real_pt = make_point((Eigen::VectorXcd(3) << 0.3, -0.8, 0.52).finished());
  ProjectivePoint fixed = conjugation(real_pt);
  CHECK((fixed.z - real_pt.z).norm() < 1e-14);
  CHECK(is_real_point(real_pt));
}

TEST_CASE("fs distance basics") {
  ProjectivePoint e0 = make_point((Eigen::VectorXcd(2) << 1.0, 0.0).finished());
  ProjectivePoint e1 = make_point((Eigen::VectorXcd(2) << 0.0, 1.0).finished());
  CHECK(fs_distance(e0, e1) == doctest::Approx(1.5707963267948966));  // diameter pi/2
  CHECK(fs_distance(e0, e0) == doctest::Approx(0.0));
}

TEST_CASE("tangent frame annihilates the gradient and is orthonormal") {
  Rng rng(5);
  HomogeneousPolynomial F = fermat(3, 4, -1.0);
  for (int i = 0; i < 50; ++i) {
    Complex x = rng.complex_gaussian(), y = rng.complex_gaussian();
    ProjectivePoint pt = quartic_point(x, y);
    TangentFrame fr = tangent_frame(F, pt);
    Eigen::VectorXcd grad = F.eval_gradient(pt.z);
    for (int k = 0; k < fr.vectors.cols(); ++k) {
      Complex pairing = (grad.array() * fr.vectors.col(k).array()).sum();
      CHECK(std::abs(pairing) < 1e-12);
    }
    Eigen::MatrixXcd g = fs_metric_restricted(F, pt, fr);
    CHECK((g - Eigen::MatrixXcd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("quintic surface frame has two orthonormal columns") {
  HomogeneousPolynomial F = fermat(4, 5);
  Rng rng(17);
  for (int i = 0; i < 20; ++i) {
    Eigen::VectorXcd z(4);
    Complex x = rng.complex_gaussian(), y = rng.complex_gaussian(), u = rng.complex_gaussian();
    Complex w5 = -(x * x * x * x * x + y * y * y * y * y + u * u * u * u * u);
    z << x, y, u, std::pow(w5, 0.2);
    ProjectivePoint pt = make_point(std::move(z));
    TangentFrame fr = tangent_frame(F, pt);
    CHECK(fr.vectors.cols() == 2);
    Eigen::MatrixXcd g = fs_metric_restricted(F, pt, fr);
    CHECK((g - Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
    // positive definiteness of the restriction at the sample
    CHECK(g(0, 0).real() > 0.0);
  }
}

TEST_CASE("frame is real at real points (explicit real Gram-Schmidt oracle)") {
  HomogeneousPolynomial F = fermat(3, 4, -1.0);
  // real point of the quartic: (t, y(t), 1), y = (1 - t^4)^{1/4}
  double t = 0.6;
  double y = std::pow(1.0 - t * t * t * t, 0.25);
  ProjectivePoint pt = make_point((Eigen::VectorXcd(3) << t, y, 1.0).finished());
  TangentFrame fr = tangent_frame(F, pt);
  double imag_resid = fr.vectors.imag().cwiseAbs().maxCoeff();
  CHECK(imag_resid <= 1e-10);

  // oracle: real Gram-Schmidt of the real adapted vector reproduces the frame
  FramePlan plan = plan_frame(F, pt);
  Eigen::MatrixXcd adapted = adapted_tangent_basis(plan, pt.z);
  Eigen::VectorXd v = adapted.col(0).real();
  double nrm = std::sqrt(fs_inner(v.cast<Complex>(), v.cast<Complex>(), pt.z).real());
  Eigen::VectorXd expect = v / nrm;
  CHECK((fr.vectors.col(0).real() - expect).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("sigma invariance of the restricted metric for real F") {
  HomogeneousPolynomial F = fermat(3, 4, -1.0);
  Rng rng(23);
  for (int i = 0; i < 20; ++i) {
    ProjectivePoint pt = quartic_point(rng.complex_gaussian(), rng.complex_gaussian());
    ProjectivePoint cpt = conjugation(pt);
    TangentFrame fr = tangent_frame(F, pt);
    TangentFrame cfr;
    cfr.base = cpt;
    cfr.vectors = fr.vectors.conjugate();
    Eigen::MatrixXcd g = fs_metric_restricted(F, pt, fr);
    Eigen::MatrixXcd cg = fs_metric_restricted(F, cpt, cfr);
    CHECK((cg - g.conjugate()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("singular point is rejected") {
  // x^2 y^2 - z^4 has singular points where the gradient vanishes, e.g. (1,0,0)
  std::vector<Term> terms(2);
  terms[0].exps[0] = 2;
  terms[0].exps[1] = 2;
  terms[0].coef = 1.0;
  terms[1].exps[2] = 4;
  terms[1].coef = -1.0;
  HomogeneousPolynomial S = HomogeneousPolynomial::from_terms(3, 4, terms);
  ProjectivePoint bad = make_point((Eigen::VectorXcd(3) << 1.0, 0.0, 0.0).finished());
  CHECK_THROWS_AS(plan_frame(S, bad), SingularPointError);
}
