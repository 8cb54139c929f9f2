#pragma once

#include <Eigen/Core>

#include "berglab/poly.hpp"

namespace berglab {

// Point of CP^{n} stored as a unit homogeneous vector in canonical gauge:
// the chart coordinate (the one of largest modulus) is real and positive.
struct ProjectivePoint {
  Eigen::VectorXcd z;
  int chart = 0;

  int num_vars() const { return static_cast<int>(z.size()); }
};

// Normalize + gauge an arbitrary homogeneous representative.
ProjectivePoint make_point(Eigen::VectorXcd raw);

// The antiholomorphic involution z -> conj(z). Exactly involutive on
// canonically gauged points.
ProjectivePoint conjugation(const ProjectivePoint& pt);

bool is_real_point(const ProjectivePoint& pt, double tol = 1e-10);

// Geodesic Fubini-Study distance for omega_FS = (i/2) dd^c log|z|^2
// (diameter pi/2, vol(CP^1) = pi).
double fs_distance(const ProjectivePoint& a, const ProjectivePoint& b);

// Fubini-Study Hermitian form on ambient tangent representatives at z.
// Valid for any scaling of z; invariant under v -> v + c z. The pair
// (point representative, vector) must come from one parameterization.
Complex fs_inner(const Eigen::VectorXcd& v, const Eigen::VectorXcd& w,
                 const Eigen::VectorXcd& z);

// Chart/residue bookkeeping at a point of the hypersurface F = 0:
// chart = coordinate of largest modulus, solved = the gradient component of
// largest modulus among the rest (the coordinate eliminated by F locally).
struct FramePlan {
  int chart = 0;
  int solved = 0;
  Eigen::VectorXcd gradient;  // of F at the canonical representative
};

FramePlan plan_frame(const HomogeneousPolynomial& F, const ProjectivePoint& pt);

// Relative gradient floor below which a sample counts as (numerically)
// singular and is rejected.
constexpr double kSingularGradientTol = 1e-8;

struct TangentFrame {
  ProjectivePoint base;
  // Columns: holomorphic tangent vectors of the hypersurface, ambient gauge
  // v[chart] = 0, orthonormal for the restricted Fubini-Study form.
  Eigen::MatrixXcd vectors;
};

// Deterministic orthonormal frame (Gram-Schmidt over the adapted basis in
// ascending free-coordinate order). Real at real points of a real F.
TangentFrame tangent_frame(const HomogeneousPolynomial& F, const ProjectivePoint& pt);

// Matrix of the restricted FS metric in the given frame (identity whenever
// the frame itself is FS-orthonormal).
Eigen::MatrixXcd fs_metric_restricted(const HomogeneousPolynomial& F,
                                      const ProjectivePoint& pt,
                                      const TangentFrame& frame);

// Adapted (non-orthonormal) tangent basis t_k = e_k - (d_k F / d_s F) e_s,
// k running over the free coordinates in ascending order.
Eigen::MatrixXcd adapted_tangent_basis(const FramePlan& plan, const Eigen::VectorXcd& z);

// Free coordinate indices of a plan (all but chart and solved), ascending.
std::vector<int> free_indices(const FramePlan& plan, int num_vars);

}  // namespace berglab
