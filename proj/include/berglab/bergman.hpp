#pragma once

#include <functional>
#include <memory>
#include <string>

#include "berglab/canonical.hpp"

namespace berglab {

struct GramResult {
  Eigen::MatrixXcd G;
  Eigen::MatrixXd se;  // per-entry Monte-Carlo standard error (chunk blocks)
  std::size_t points_used = 0;
};

// G_ij = sum over pool of weight * <s_i, s_j>_{h^m} for the metric h induced
// on K by g. Throws QuadratureError when G fails to be positive semidefinite
// beyond tolerance, NumericalError when it is singular (dependent sections).
GramResult gram_matrix(const SectionBasis& basis, const HomogeneousPolynomial& F,
                       const SamplePool& pool, const BaseMetric& g = {});

// Lower-triangular (Cholesky) orthonormalization in the fixed basis order;
// requires a real symmetric positive definite G and real representatives.
SectionBasis orthonormal_real_basis(const Eigen::MatrixXd& G, const SectionBasis& basis);

// phi_m = sum kappa_i^{(x)2}: representative sum of squares reduced mod F.
CanonicalSection phi_m(const SectionBasis& kappa, const HomogeneousPolynomial& F);

// Orthonormal real basis of H_m^L plus derived evaluators for one power m.
struct BergmanData {
  int m = 1;
  HomogeneousPolynomial F;
  SectionBasis kappa;      // real representatives, Gram ~ identity
  CanonicalSection phi;    // power 2m
  BaseMetric g;            // base metric defining the inner product
  double gram_residual = 0.0;
  double gram_se_max = 0.0;
  // normalization record
  std::uint64_t pool_seed = 0;
  std::size_t pool_points = 0;
  double pool_measure = 0.0;
};

BergmanData build_bergman(const HomogeneousPolynomial& F, int m, const SamplePool& pool,
                          const BaseMetric& g = {});

// Frame coefficients a_i = P_i(z)/z_c^D of the kappa basis at a point
// representative z (any scale), using the chart of largest modulus.
Eigen::VectorXcd kappa_coefficients(const BergmanData& bd, const Eigen::VectorXcd& z);

// rho_m = sum |kappa_i|^2_{h^m} > 0 away from base points.
double density_of_states(const BergmanData& bd, const ProjectivePoint& pt);

// Bergman metric omega_m = (pullback of FS under the Kodaira map)/m as a
// Hermitian matrix on the given tangent frame. Exact polynomial derivatives.
Eigen::MatrixXcd bergman_metric(const BergmanData& bd, const TangentFrame& frame);

// |phi_m|_{h_m}(pt) = |sum a_i^2| / sum |a_i|^2, in [0, 1], equal to 1
// exactly on the real locus.
double hm_norm_phi(const BergmanData& bd, const ProjectivePoint& pt);

// Newton-solve the `solved` coordinate of a representative so that
// F(zeta) = 0, all other coordinates held fixed.
bool newton_resolve_solved(const HomogeneousPolynomial& F, int solved,
                           Eigen::VectorXcd& zeta, int max_iters = 30,
                           double tol = 1e-13);

// Chart of largest modulus / chart+solved plan at an arbitrary representative.
LocalFrame frame_at_rep(const HomogeneousPolynomial& F, const Eigen::VectorXcd& z);

// ---- curvature diagnostics ----------------------------------------------

// Finite-difference complex Hessian (two-sided stencils at scale eps) of a
// real function psi of the local holomorphic coordinates of M at pt.
// Local coordinates: the free affine coordinates of the default frame; the
// solved coordinate follows by Newton.
Eigen::MatrixXcd local_complex_hessian_fd(
    const HomogeneousPolynomial& F, const ProjectivePoint& pt, double eps,
    const std::function<double(const Eigen::VectorXcd&)>& psi_of_rep);

// Curvature form of the metric induced on K(M) by g, as a Hermitian matrix
// on the local coordinates at pt (finite differences at scale eps).
// Negative-definite on the d = 1 control (K(CP^1) is negative).
Eigen::MatrixXcd k_curvature_fd(const HomogeneousPolynomial& F, const ProjectivePoint& pt,
                                const BaseMetric& g, double eps);

// Curvature of h_m on K (finite differences); equals bergman_metric up to
// discretization.
Eigen::MatrixXcd hm_curvature_fd(const BergmanData& bd, const ProjectivePoint& pt, double eps);

// Smallest generalized eigenvalue of `form` relative to the restricted
// metric of g at pt, both expressed on the local coordinate basis.
double min_relative_eigenvalue(const HomogeneousPolynomial& F, const ProjectivePoint& pt,
                               const BaseMetric& g, const Eigen::MatrixXcd& form);

struct AssumptionReport {
  double min_eigenvalue = 0.0;      // min over pool of min relative eigenvalue
  double max_eigenvalue = 0.0;
  double stencil_agreement = 0.0;   // max |lambda_eps1 - lambda_eps2|
  std::size_t samples = 0;
  std::size_t skipped = 0;          // stencil left the chart / Newton failed
  bool positive() const { return min_eigenvalue > 0.0; }
};

// The section-3 Assumption diagnostic: sign of the K-curvature of g over a
// pool, with a two-scale stencil comparison.
AssumptionReport assumption_check(const BaseMetric& g, const HomogeneousPolynomial& F,
                                  const SamplePool& pool, double eps1 = 1e-3,
                                  double eps2 = 1e-4, std::size_t max_samples = 1000);

// ---- metric contexts ------------------------------------------------------

// Riemannian metric on hypersurface tangent representatives. The pair
// (representative z, vector v) must come from one parameterization.
class MetricContext {
 public:
  enum class Kind { BaseFS, Bergman, ConstantChart };

  static MetricContext base_fs(const HomogeneousPolynomial& F, BaseMetric g = {});
  // g_m on a plane curve (n = 1): |v|^2 = |Omega(v)|^2 (sum |a_i|^2)^{1/m},
  // the exact dual of h_m on K = T*M.
  static MetricContext bergman_gm(std::shared_ptr<const BergmanData> bd);
  // Synthetic: value * sum of |du_j(v)|^2 over non-chart coordinates.
  static MetricContext constant_chart(double value, int chart, int num_vars);

  MetricContext with_multiplier(std::function<double(const Eigen::VectorXcd&)> mult) const;
  MetricContext scaled(double factor) const;

  double length_sq(const Eigen::VectorXcd& v, const Eigen::VectorXcd& z) const;
  double length(const Eigen::VectorXcd& v, const Eigen::VectorXcd& z) const;

  Kind kind() const { return kind_; }
  const BergmanData* bergman_data() const { return bd_.get(); }
  // product of conformal multipliers at z (1 when none installed)
  double multiplier(const Eigen::VectorXcd& z) const;

 private:
  Kind kind_ = Kind::BaseFS;
  HomogeneousPolynomial F_;
  BaseMetric g_;
  std::shared_ptr<const BergmanData> bd_;
  double scale_ = 1.0;
  double const_value_ = 1.0;
  int const_chart_ = 0;
  std::vector<std::function<double(const Eigen::VectorXcd&)>> multipliers_;
};

// |Omega|^2 for the K-metric induced by `metric` on a plane curve, computed
// through the metric itself (duality route, independent of frame_h_norm_sq).
double induced_k_norm_sq_curve(const MetricContext& metric, const HomogeneousPolynomial& F,
                               const ProjectivePoint& pt);

void save_bergman(const std::string& dir, const std::string& stem, const BergmanData& bd);

}  // namespace berglab
