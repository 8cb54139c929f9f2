#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "berglab/errors.hpp"
#include "berglab/parallel.hpp"
#include "berglab/sampling.hpp"
#include "oracles.hpp"

using namespace berglab;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("chart-quadrature oracles reproduce the Wirtinger values") {
  CHECK(oracles::line_area() == doctest::Approx(kPi).epsilon(0.005));
  CHECK(oracles::fermat_curve_area(4, -1.0) == doctest::Approx(4.0 * kPi).epsilon(0.007));
}

TEST_CASE("complex locus sampling estimates the FS volume") {
  HomogeneousPolynomial F = fermat(3, 4, -1.0);
  SamplePool pool = sample_complex_locus(F, 20000, 12345);
  double target = 4.0 * kPi;
  CHECK(std::abs(pool.total_measure - target) <
        std::max(3.0 * pool.measure_se + 1e-9, 0.01 * target));
  CHECK(pool.total_measure == doctest::Approx(pool.weight_sum()));
  CHECK(pool.residual_max <= 1e-10);
  CHECK(pool.points.size() >= 19000);

  SamplePool line_pool = sample_complex_locus(fermat(3, 1, -1.0), 2000, 99);
  CHECK(std::abs(line_pool.total_measure - kPi) < 0.01 * kPi);
}

TEST_CASE("sigma maps complex pools onto themselves") {
  HomogeneousPolynomial F = fermat(3, 4, -1.0);
  SamplePool pool = sample_complex_locus(F, 2000, 7);
  double scale = F.coefficient_scale();
  // conjugated points stay on the locus with the same residual bound, and
  // the pool is conjugation-paired by construction
  for (std::size_t i = 0; i + 1 < pool.points.size(); i += 2) {
    ProjectivePoint c = conjugation(pool.points[i].pt);
    CHECK(std::abs(F.eval(c.z)) / scale <= 1e-10);
    CHECK((c.z - pool.points[i + 1].pt.z).norm() < 1e-12);
  }
}

TEST_CASE("real locus sampling matches the dense-sweep length oracle") {
  HomogeneousPolynomial F = fermat(3, 4, -1.0);
  SamplePool pool = sample_real_locus(F, 2000, 31);
  double oracle_len = oracles::quartic_oval_length();
  CHECK(std::abs(pool.total_measure - oracle_len) <
        std::max(3.0 * pool.measure_se, 0.01 * oracle_len));
  for (const auto& p : pool.points) {
    CHECK(is_real_point(p.pt, 1e-12));
    CHECK(std::abs(F.eval(p.pt.z)) <= 1e-10 * F.coefficient_scale());
    CHECK((conjugation(p.pt).z - p.pt.z).norm() < 1e-12);
  }
  CHECK(connected_components(pool) == 1);  // the affine oval x^4+y^4=1
}

TEST_CASE("empty real locus raises") {
  HomogeneousPolynomial F = fermat(3, 4, 1.0);  // x^4 + y^4 + z^4
  CHECK_THROWS_AS(sample_real_locus(F, 500, 5), EmptyRealLocusError);
}

TEST_CASE("real sampling requires real coefficients") {
  std::vector<Term> terms(2);
  terms[0].exps[0] = 1;
  terms[0].coef = Complex(0.0, 1.0);
  terms[1].exps[1] = 1;
  terms[1].coef = 1.0;
  HomogeneousPolynomial F = HomogeneousPolynomial::from_terms(3, 1, terms);
  CHECK_THROWS_AS(sample_real_locus(F, 500, 5), ValidationError);
}

TEST_CASE("quintic surface sampling works in CP^3") {
  HomogeneousPolynomial F = fermat(4, 5);
  SamplePool pool = sample_complex_locus(F, 4000, 2024);
  double target = 5.0 * kPi * kPi / 2.0;  // d * vol(CP^2)
  CHECK(std::abs(pool.total_measure - target) <
        std::max(3.0 * pool.measure_se + 1e-9, 0.01 * target));
  SamplePool rpool = sample_real_locus(F, 500, 77);
  for (const auto& p : rpool.points) CHECK((conjugation(p.pt).z - p.pt.z).norm() < 1e-12);
}

TEST_CASE("sampling is deterministic and thread-count independent") {
  HomogeneousPolynomial F = fermat(3, 4, -1.0);
  set_max_threads(1);
  SamplePool a = sample_complex_locus(F, 3000, 555);
  set_max_threads(4);
  SamplePool b = sample_complex_locus(F, 3000, 555);
  set_max_threads(0);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i)
    CHECK((a.points[i].pt.z - b.points[i].pt.z).norm() == 0.0);
  CHECK(a.total_measure == b.total_measure);
}

TEST_CASE("pool CSV round trip") {
  HomogeneousPolynomial F = fermat(3, 4, -1.0);
  SamplePool pool = sample_real_locus(F, 300, 9);
  std::string path = "test_pool_roundtrip.csv";
  save_pool_csv(path, pool);
  SamplePool back = load_pool_csv(path);
  REQUIRE(back.points.size() == pool.points.size());
  CHECK(back.seed == pool.seed);
  CHECK(back.total_measure == doctest::Approx(pool.total_measure).epsilon(1e-15));
  for (std::size_t i = 0; i < pool.points.size(); ++i) {
    CHECK((back.points[i].pt.z - pool.points[i].pt.z).norm() < 1e-15);
    CHECK(back.points[i].weight == doctest::Approx(pool.points[i].weight).epsilon(1e-15));
  }
  std::remove(path.c_str());
}
