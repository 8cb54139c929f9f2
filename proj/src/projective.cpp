#include "berglab/projective.hpp"

#include <algorithm>
#include <cmath>

#include "berglab/errors.hpp"

namespace berglab {

ProjectivePoint make_point(Eigen::VectorXcd raw) {
  double n = raw.norm();
  if (!(n > 0.0)) throw ValidationError("make_point: zero vector");
  raw /= n;
  int chart = 0;
  double best = -1.0;
  for (int j = 0; j < raw.size(); ++j) {
    double m = std::abs(raw[j]);
    if (m > best) {
      best = m;
      chart = j;
    }
  }
  Complex pivot = raw[chart];
  raw *= std::conj(pivot) / std::abs(pivot);
  // kill roundoff in the pivot's imaginary part so the gauge is exact
  raw[chart] = Complex(std::abs(raw[chart]), 0.0);
  ProjectivePoint pt;
  pt.z = std::move(raw);
  pt.chart = chart;
  return pt;
}

ProjectivePoint conjugation(const ProjectivePoint& pt) {
  return make_point(pt.z.conjugate());
}

bool is_real_point(const ProjectivePoint& pt, double tol) {
  for (int j = 0; j < pt.z.size(); ++j)
    if (std::abs(pt.z[j].imag()) > tol) return false;
  return true;
}

double fs_distance(const ProjectivePoint& a, const ProjectivePoint& b) {
  Complex ip = a.z.dot(b.z);  // conjugate-linear in a.z
  double c = std::min(1.0, std::abs(ip));
  return std::acos(c);
}

Complex fs_inner(const Eigen::VectorXcd& v, const Eigen::VectorXcd& w,
                 const Eigen::VectorXcd& z) {
  double zz = z.squaredNorm();
  Complex vw = w.dot(v);  // sum v_j conj(w_j)
  Complex vz = z.dot(v);
  Complex zw = w.dot(z);
  return (vw * zz - vz * zw) / (zz * zz);
}

FramePlan plan_frame(const HomogeneousPolynomial& F, const ProjectivePoint& pt) {
  if (F.num_vars() != pt.num_vars())
    throw ValidationError("plan_frame: dimension mismatch");
  FramePlan plan;
  plan.chart = pt.chart;
  plan.gradient = F.eval_gradient(pt.z);
  double gmax = plan.gradient.cwiseAbs().maxCoeff();
  double scale = F.degree() * std::max(F.coefficient_scale(), 1e-300);
  if (gmax <= kSingularGradientTol * scale)
    throw SingularPointError("gradient vanishes at sample point (singular hypersurface?)");
  int solved = -1;
  double best = -1.0;
  for (int j = 0; j < pt.num_vars(); ++j) {
    if (j == plan.chart) continue;
    double m = std::abs(plan.gradient[j]);
    if (m > best) {
      best = m;
      solved = j;
    }
  }
  if (best <= kSingularGradientTol * scale)
    throw ChartError("no usable solved coordinate in this chart");
  plan.solved = solved;
  return plan;
}

std::vector<int> free_indices(const FramePlan& plan, int num_vars) {
  std::vector<int> free;
  free.reserve(num_vars - 2);
  for (int j = 0; j < num_vars; ++j)
    if (j != plan.chart && j != plan.solved) free.push_back(j);
  return free;
}

Eigen::MatrixXcd adapted_tangent_basis(const FramePlan& plan, const Eigen::VectorXcd& z) {
  const int n = static_cast<int>(z.size());
  auto free = free_indices(plan, n);
  Eigen::MatrixXcd basis = Eigen::MatrixXcd::Zero(n, free.size());
  Complex gs = plan.gradient[plan.solved];
  for (std::size_t k = 0; k < free.size(); ++k) {
    basis(free[k], k) = Complex(1.0, 0.0);
    basis(plan.solved, k) = -plan.gradient[free[k]] / gs;
  }
  return basis;
}

TangentFrame tangent_frame(const HomogeneousPolynomial& F, const ProjectivePoint& pt) {
  FramePlan plan = plan_frame(F, pt);
  Eigen::MatrixXcd basis = adapted_tangent_basis(plan, pt.z);
  const int q = static_cast<int>(basis.cols());
  // Gram-Schmidt with respect to the restricted FS form, fixed column order.
  for (int k = 0; k < q; ++k) {
    for (int j = 0; j < k; ++j) {
      Complex proj = fs_inner(basis.col(k), basis.col(j), pt.z);
      basis.col(k) -= proj * basis.col(j);
    }
    double nrm = std::sqrt(std::abs(fs_inner(basis.col(k), basis.col(k), pt.z).real()));
    if (!(nrm > 1e-14)) throw ChartError("tangent frame degenerated during Gram-Schmidt");
    basis.col(k) /= nrm;
  }
  TangentFrame frame;
  frame.base = pt;
  frame.vectors = std::move(basis);
  return frame;
}

Eigen::MatrixXcd fs_metric_restricted(const HomogeneousPolynomial& F,
                                      const ProjectivePoint& pt,
                                      const TangentFrame& frame) {
  double residual = std::abs(F.eval(pt.z));
  if (residual > 1e-6 * std::max(F.coefficient_scale(), 1e-300))
    throw ValidationError("fs_metric_restricted: point is not on the hypersurface");
  const int q = static_cast<int>(frame.vectors.cols());
  Eigen::MatrixXcd g(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      g(i, j) = fs_inner(frame.vectors.col(i), frame.vectors.col(j), pt.z);
  return g;
}

}  // namespace berglab
