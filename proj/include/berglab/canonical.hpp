#pragma once

#include <functional>
#include <string>
#include <vector>

#include "berglab/projective.hpp"
#include "berglab/sampling.hpp"

namespace berglab {

// Section of K(M)^{m} on the degree-d hypersurface M = {F = 0} in CP^n,
// represented by a homogeneous polynomial of degree m(d - n - 1) through the
// residue trivialization. In the chart/solved frame (c, s) the section is
//   rep(z)/z_c^D * Omega_{c,s}^{m},  D = m(d - n - 1),
// where Omega is the signed residue frame (see frame_pairing).
struct CanonicalSection {
  int m = 1;
  HomogeneousPolynomial rep;
};

struct SectionBasis {
  int m = 1;
  std::vector<CanonicalSection> sections;
  bool orthonormal = false;
  double gram_residual = 0.0;

  int dimension() const { return static_cast<int>(sections.size()); }
};

struct LocalFrame {
  int chart = 0;
  int solved = 0;
};

// m(d - n - 1); throws ValidationError unless d > n + 1 (positive K).
int canonical_rep_degree(const HomogeneousPolynomial& F, int m);

// Expected dimension from the restriction exact sequence:
// C(D+n, n) - C(D-d+n, n) for D = m(d-n-1).
int expected_section_dimension(const HomogeneousPolynomial& F, int m);

// Monomial basis of degree D = m(d-n-1) reduced modulo F: all monomials of
// that degree not divisible by the graded-lex leading monomial of F,
// descending graded-lex order.
SectionBasis section_space_basis(const HomogeneousPolynomial& F, int m);

LocalFrame default_frame(const HomogeneousPolynomial& F, const ProjectivePoint& pt);

// Frame coefficient rep(z)/z_chart^D. Throws ChartError when the frame is
// degenerate at pt (switch charts).
Complex evaluate_section(const CanonicalSection& s, const HomogeneousPolynomial& F,
                         const ProjectivePoint& pt, const LocalFrame& frame);

// Value of the signed residue frame Omega_{c,s} on tangent representatives
// (columns of `vectors`, taken at the representative `z`, any gauge).
Complex frame_pairing(const HomogeneousPolynomial& F, const LocalFrame& frame,
                      const Eigen::VectorXcd& z, const Eigen::MatrixXcd& vectors);

// Base Hermitian metric: e^{conformal_log} times the FS restriction.
// The artifact never needs anything beyond conformal rescalings of FS.
// The callback receives a homogeneous representative of any scale and must
// be scale-invariant.
struct BaseMetric {
  std::function<double(const Eigen::VectorXcd&)> conformal_log;  // empty => 0

  double log_factor(const Eigen::VectorXcd& z) const {
    return conformal_log ? conformal_log(z) : 0.0;
  }
};

// |Omega|^2 for the metric induced on K by g at pt:
// |Omega(t_1..t_q)|^2 / det[g(t_i, t_j)] over any tangent basis t.
double frame_h_norm_sq(const HomogeneousPolynomial& F, const LocalFrame& frame,
                       const ProjectivePoint& pt, const BaseMetric& g = {});

// |s|_{h^m}(pt); frame-independent.
double section_norm_g(const CanonicalSection& s, const HomogeneousPolynomial& F,
                      const ProjectivePoint& pt, const BaseMetric& g = {});

// sigma^* with conjugation: conjugates the representative's coefficients.
CanonicalSection sigma_pullback(const CanonicalSection& s);

// Scale-invariant proximity to the divisor {s = 0}:
// |rep(z)| / sqrt(sum over terms |coef * monomial(z)|^2) at the unit
// representative. Exactly 0 on the divisor; invariant under rescaling of rep.
double divisor_proximity(const CanonicalSection& s, const ProjectivePoint& pt);

// SectionBasis file: '# {json manifest}' line, then polynomials in the text
// format separated by '---' lines.
void save_basis(const std::string& path, const SectionBasis& basis);
SectionBasis load_basis(const std::string& path);

}  // namespace berglab
