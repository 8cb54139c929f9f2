#include "berglab/bergman.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "berglab/errors.hpp"
#include "berglab/parallel.hpp"

namespace berglab {

namespace {

constexpr std::size_t kGramChunk = 1024;

int chart_of(const Eigen::VectorXcd& z) {
  int c = 0;
  double best = -1.0;
  for (int j = 0; j < z.size(); ++j) {
    double m = std::abs(z[j]);
    if (m > best) {
      best = m;
      c = j;
    }
  }
  return c;
}

LocalFrame frame_at(const HomogeneousPolynomial& F, const Eigen::VectorXcd& z) {
  int c = chart_of(z);
  Eigen::VectorXcd grad = F.eval_gradient(z);
  int s = -1;
  double best = -1.0;
  for (int j = 0; j < z.size(); ++j) {
    if (j == c) continue;
    double m = std::abs(grad[j]);
    if (m > best) {
      best = m;
      s = j;
    }
  }
  if (s < 0 || best <= 0.0) throw ChartError("frame_at: degenerate gradient");
  return {c, s};
}

}  // namespace

bool newton_resolve_solved(const HomogeneousPolynomial& F, int solved,
                           Eigen::VectorXcd& zeta, int max_iters, double tol) {
  double scale = std::max(F.coefficient_scale(), 1e-300) *
                 std::pow(std::max(zeta.norm(), 0.5), F.degree());
  for (int it = 0; it < max_iters; ++it) {
    Complex val = F.eval(zeta);
    if (std::abs(val) <= tol * scale) return true;
    Complex gs = F.eval_gradient(zeta)[solved];
    if (std::abs(gs) < 1e-300) return false;
    zeta[solved] -= val / gs;
  }
  return std::abs(F.eval(zeta)) <= 100.0 * tol * scale;
}

LocalFrame frame_at_rep(const HomogeneousPolynomial& F, const Eigen::VectorXcd& z) {
  return frame_at(F, z);
}

GramResult gram_matrix(const SectionBasis& basis, const HomogeneousPolynomial& F,
                       const SamplePool& pool, const BaseMetric& g) {
  if (pool.locus != Locus::Complex)
    throw ValidationError("gram_matrix: quadrature pool must live on the complex locus");
  if (pool.points.empty()) throw ValidationError("gram_matrix: empty pool");
  const int dim = basis.dimension();
  if (dim == 0) throw ValidationError("gram_matrix: empty basis");
  const int m = basis.m;
  const int D = basis.sections.front().rep.degree();

  const std::size_t chunks = (pool.points.size() + kGramChunk - 1) / kGramChunk;
  std::vector<Eigen::MatrixXcd> partial(chunks);
  std::vector<std::size_t> used(chunks, 0);
  parallel_chunks(chunks, [&](std::size_t ci) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(dim, dim);
    Eigen::VectorXcd a(dim);
    std::size_t begin = ci * kGramChunk;
    std::size_t end = std::min(pool.points.size(), begin + kGramChunk);
    for (std::size_t i = begin; i < end; ++i) {
      const auto& pp = pool.points[i];
      LocalFrame frame = frame_at(F, pp.pt.z);
      double w_frame = frame_h_norm_sq(F, frame, pp.pt, g);
      Complex zcD = std::pow(pp.pt.z[frame.chart], D);
      for (int k = 0; k < dim; ++k) a[k] = basis.sections[k].rep.eval(pp.pt.z) / zcD;
      acc.noalias() += (pp.weight * std::pow(w_frame, m)) * (a * a.adjoint());
      ++used[ci];
    }
    partial[ci] = std::move(acc);
  });

  GramResult out;
  out.G = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& p : partial) out.G += p;
  for (auto u : used) out.points_used += u;

  out.se = Eigen::MatrixXd::Zero(dim, dim);
  if (chunks > 1) {
    Eigen::MatrixXcd mean = out.G / static_cast<double>(chunks);
    Eigen::MatrixXd var = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& p : partial) var += (p - mean).cwiseAbs2();
    var /= static_cast<double>(chunks - 1);
    out.se = (var * static_cast<double>(chunks)).cwiseSqrt();
  }

  Eigen::MatrixXcd herm = 0.5 * (out.G + out.G.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm);
  double emin = es.eigenvalues().minCoeff();
  double emax = es.eigenvalues().maxCoeff();
  if (emax <= 0.0 || emin < -1e-12 * emax)
    throw QuadratureError("gram_matrix: Gram matrix indefinite -- quadrature too coarse");
  if (emin <= 1e-12 * emax)
    throw NumericalError("gram_matrix: Gram matrix singular (dependent sections?)");
  return out;
}

SectionBasis orthonormal_real_basis(const Eigen::MatrixXd& G, const SectionBasis& basis) {
  const int dim = basis.dimension();
  if (G.rows() != dim || G.cols() != dim)
    throw ValidationError("orthonormal_real_basis: Gram size mismatch");
  if ((G - G.transpose()).cwiseAbs().maxCoeff() > 1e-8 * G.cwiseAbs().maxCoeff())
    throw ValidationError("orthonormal_real_basis: Gram not symmetric");
  for (const auto& s : basis.sections)
    if (!s.rep.is_real(1e-12))
      throw ValidationError("orthonormal_real_basis: basis representatives must be real");
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success)
    throw ValidationError("orthonormal_real_basis: Gram not positive definite");
  Eigen::MatrixXd Linv =
      llt.matrixL().solve(Eigen::MatrixXd::Identity(dim, dim));

  SectionBasis out;
  out.m = basis.m;
  const int D = basis.sections.front().rep.degree();
  for (int i = 0; i < dim; ++i) {
    HomogeneousPolynomial rep(basis.sections.front().rep.num_vars(), D);
    for (int j = 0; j <= i; ++j) {
      double c = Linv(i, j);
      if (c == 0.0) continue;
      rep = rep + basis.sections[j].rep * Complex(c, 0.0);
    }
    out.sections.push_back({basis.m, rep});
  }
  out.orthonormal = true;
  out.gram_residual =
      (Linv * G * Linv.transpose() - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff();
  return out;
}

CanonicalSection phi_m(const SectionBasis& kappa, const HomogeneousPolynomial& F) {
  if (!kappa.orthonormal)
    throw ValidationError("phi_m: basis must be orthonormalized first");
  const int nv = F.num_vars();
  const int D = kappa.sections.front().rep.degree();
  HomogeneousPolynomial acc(nv, 2 * D);
  for (const auto& s : kappa.sections) acc = acc + s.rep.multiply(s.rep);
  return {2 * kappa.m, acc.reduce_mod(F)};
}

BergmanData build_bergman(const HomogeneousPolynomial& F, int m, const SamplePool& pool,
                          const BaseMetric& g) {
  SectionBasis basis = section_space_basis(F, m);
  GramResult gr = gram_matrix(basis, F, pool, g);
  double scale = gr.G.cwiseAbs().maxCoeff();
  double imag_max = gr.G.imag().cwiseAbs().maxCoeff();
  if (imag_max > 1e-8 * scale)
    throw NumericalError("build_bergman: Gram has large imaginary part for a real basis");
  BergmanData bd;
  bd.m = m;
  bd.F = F;
  bd.kappa = orthonormal_real_basis(gr.G.real(), basis);
  bd.phi = phi_m(bd.kappa, F);
  bd.g = g;
  bd.gram_residual = bd.kappa.gram_residual;
  bd.gram_se_max = gr.se.maxCoeff();
  bd.pool_seed = pool.seed;
  bd.pool_points = pool.points.size();
  bd.pool_measure = pool.total_measure;
  return bd;
}

Eigen::VectorXcd kappa_coefficients(const BergmanData& bd, const Eigen::VectorXcd& z) {
  const int dim = bd.kappa.dimension();
  const int D = bd.kappa.sections.front().rep.degree();
  int c = chart_of(z);
  Complex zcD = std::pow(z[c], D);
  Eigen::VectorXcd a(dim);
  for (int k = 0; k < dim; ++k) a[k] = bd.kappa.sections[k].rep.eval(z) / zcD;
  return a;
}

double density_of_states(const BergmanData& bd, const ProjectivePoint& pt) {
  LocalFrame frame = frame_at(bd.F, pt.z);
  double w = frame_h_norm_sq(bd.F, frame, pt, bd.g);
  Eigen::VectorXcd a = kappa_coefficients(bd, pt.z);
  return a.squaredNorm() * std::pow(w, bd.m);
}

Eigen::MatrixXcd bergman_metric(const BergmanData& bd, const TangentFrame& frame) {
  const Eigen::VectorXcd& z = frame.base.z;
  const int dim = bd.kappa.dimension();
  const int q = static_cast<int>(frame.vectors.cols());
  Eigen::VectorXcd w(dim);
  Eigen::MatrixXcd jac(dim, q);
  for (int i = 0; i < dim; ++i) {
    const auto& rep = bd.kappa.sections[i].rep;
    w[i] = rep.eval(z);
    Eigen::VectorXcd grad = rep.eval_gradient(z);
    for (int k = 0; k < q; ++k)
      jac(i, k) = (grad.array() * frame.vectors.col(k).array()).sum();
  }
  if (w.squaredNorm() < 1e-280)
    throw NumericalError("bergman_metric: base point of the linear system");
  Eigen::MatrixXcd B(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      B(i, j) = fs_inner(jac.col(i), jac.col(j), w) / static_cast<double>(bd.m);
  return B;
}

double hm_norm_phi(const BergmanData& bd, const ProjectivePoint& pt) {
  Eigen::VectorXcd a = kappa_coefficients(bd, pt.z);
  double den = a.squaredNorm();
  if (!(den > 1e-280)) throw NumericalError("hm_norm_phi: base point (rho_m ~ 0)");
  Complex num(0.0, 0.0);
  for (int i = 0; i < a.size(); ++i) num += a[i] * a[i];
  return std::abs(num) / den;
}

Eigen::MatrixXcd local_complex_hessian_fd(
    const HomogeneousPolynomial& F, const ProjectivePoint& pt, double eps,
    const std::function<double(const Eigen::VectorXcd&)>& psi_of_rep) {
  FramePlan plan = plan_frame(F, pt);
  auto free = free_indices(plan, F.num_vars());
  const int q = static_cast<int>(free.size());
  Eigen::VectorXcd zeta0 = pt.z / pt.z[plan.chart];

  auto psi = [&](const Eigen::VectorXcd& w) {
    Eigen::VectorXcd zeta = zeta0;
    Complex predictor(0.0, 0.0);
    for (int k = 0; k < q; ++k) {
      zeta[free[k]] += w[k];
      predictor -= plan.gradient[free[k]] / plan.gradient[plan.solved] * w[k];
    }
    zeta[plan.solved] += predictor;
    if (!newton_resolve_solved(F, plan.solved, zeta))
      throw ChartError("finite-difference stencil left the chart");
    return psi_of_rep(zeta);
  };

  const Complex I(0.0, 1.0);
  auto unit = [&](int k, Complex step) {
    Eigen::VectorXcd w = Eigen::VectorXcd::Zero(q);
    w[k] = step;
    return w;
  };
  double psi0 = psi(Eigen::VectorXcd::Zero(q));
  Eigen::MatrixXcd H(q, q);
  for (int k = 0; k < q; ++k) {
    double lap = psi(unit(k, eps)) + psi(unit(k, -eps)) + psi(unit(k, I * eps)) +
                 psi(unit(k, -I * eps)) - 4.0 * psi0;
    H(k, k) = lap / (4.0 * eps * eps);
  }
  auto cross = [&](int k, Complex sk, int l, Complex sl) {
    auto at = [&](double a, double b) {
      Eigen::VectorXcd w = Eigen::VectorXcd::Zero(q);
      w[k] += a * sk;
      w[l] += b * sl;
      return psi(w);
    };
    return (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * eps * eps);
  };
  for (int k = 0; k < q; ++k)
    for (int l = k + 1; l < q; ++l) {
      double dxx = cross(k, eps, l, eps);
      double dyy = cross(k, I * eps, l, I * eps);
      double dxy = cross(k, eps, l, I * eps);
      double dyx = cross(k, I * eps, l, eps);
      Complex val = 0.25 * Complex(dxx + dyy, dxy - dyx);
      H(k, l) = val;
      H(l, k) = std::conj(val);
    }
  return H;
}

namespace {

// log det of the FS gram of the adapted basis at a representative zeta,
// with the conformal contribution of g.
double log_det_restricted(const HomogeneousPolynomial& F, int chart, int solved,
                          const Eigen::VectorXcd& zeta, const BaseMetric& g) {
  FramePlan plan;
  plan.chart = chart;
  plan.solved = solved;
  plan.gradient = F.eval_gradient(zeta);
  if (std::abs(plan.gradient[solved]) < 1e-300)
    throw ChartError("log_det_restricted: degenerate solved direction");
  Eigen::MatrixXcd basis = adapted_tangent_basis(plan, zeta);
  const int q = static_cast<int>(basis.cols());
  Eigen::MatrixXcd gram(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      gram(i, j) = fs_inner(basis.col(i), basis.col(j), zeta);
  double det = gram.determinant().real();
  if (!(det > 0.0)) throw NumericalError("log_det_restricted: not positive");
  return std::log(det) + q * g.log_factor(zeta);
}

}  // namespace

Eigen::MatrixXcd k_curvature_fd(const HomogeneousPolynomial& F, const ProjectivePoint& pt,
                                const BaseMetric& g, double eps) {
  FramePlan plan = plan_frame(F, pt);
  return local_complex_hessian_fd(F, pt, eps, [&](const Eigen::VectorXcd& zeta) {
    return log_det_restricted(F, plan.chart, plan.solved, zeta, g);
  });
}

Eigen::MatrixXcd hm_curvature_fd(const BergmanData& bd, const ProjectivePoint& pt, double eps) {
  return local_complex_hessian_fd(bd.F, pt, eps, [&](const Eigen::VectorXcd& zeta) {
    double s = 0.0;
    for (const auto& sec : bd.kappa.sections) s += std::norm(sec.rep.eval(zeta));
    if (!(s > 0.0)) throw NumericalError("hm_curvature_fd: base point");
    return std::log(s) / bd.m;
  });
}

double min_relative_eigenvalue(const HomogeneousPolynomial& F, const ProjectivePoint& pt,
                               const BaseMetric& g, const Eigen::MatrixXcd& form) {
  FramePlan plan = plan_frame(F, pt);
  Eigen::MatrixXcd basis = adapted_tangent_basis(plan, pt.z);
  const int q = static_cast<int>(basis.cols());
  Eigen::MatrixXcd gram(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      gram(i, j) = fs_inner(basis.col(i), basis.col(j), pt.z) * std::exp(g.log_factor(pt.z));
  Eigen::MatrixXcd herm = 0.5 * (form + form.adjoint());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, gram);
  return es.eigenvalues().minCoeff();
}

AssumptionReport assumption_check(const BaseMetric& g, const HomogeneousPolynomial& F,
                                  const SamplePool& pool, double eps1, double eps2,
                                  std::size_t max_samples) {
  AssumptionReport report;
  report.min_eigenvalue = 1e300;
  report.max_eigenvalue = -1e300;
  if (pool.points.empty()) throw ValidationError("assumption_check: empty pool");
  std::size_t stride = std::max<std::size_t>(1, pool.points.size() / max_samples);
  for (std::size_t i = 0; i < pool.points.size(); i += stride) {
    const ProjectivePoint& pt = pool.points[i].pt;
    try {
      Eigen::MatrixXcd c1 = k_curvature_fd(F, pt, g, eps1);
      Eigen::MatrixXcd c2 = k_curvature_fd(F, pt, g, eps2);
      double l1 = min_relative_eigenvalue(F, pt, g, c1);
      double l2 = min_relative_eigenvalue(F, pt, g, c2);
      report.stencil_agreement = std::max(report.stencil_agreement, std::abs(l1 - l2));
      report.min_eigenvalue = std::min(report.min_eigenvalue, l2);
      report.max_eigenvalue = std::max(report.max_eigenvalue, l2);
      ++report.samples;
    } catch (const NumericalError&) {
      ++report.skipped;
    }
  }
  if (report.samples == 0)
    throw NumericalError("assumption_check: no usable samples");
  return report;
}

MetricContext MetricContext::base_fs(const HomogeneousPolynomial& F, BaseMetric g) {
  MetricContext m;
  m.kind_ = Kind::BaseFS;
  m.F_ = F;
  m.g_ = std::move(g);
  return m;
}

MetricContext MetricContext::bergman_gm(std::shared_ptr<const BergmanData> bd) {
  if (!bd) throw ValidationError("bergman_gm: null data");
  if (bd->F.num_vars() != 3)
    throw ValidationError("bergman_gm: the exact dual construction needs a plane curve (n = 1)");
  MetricContext m;
  m.kind_ = Kind::Bergman;
  m.F_ = bd->F;
  m.bd_ = std::move(bd);
  return m;
}

MetricContext MetricContext::constant_chart(double value, int chart, int num_vars) {
  MetricContext m;
  m.kind_ = Kind::ConstantChart;
  m.const_value_ = value;
  m.const_chart_ = chart;
  m.F_ = HomogeneousPolynomial(num_vars, 1);
  return m;
}

MetricContext MetricContext::with_multiplier(
    std::function<double(const Eigen::VectorXcd&)> mult) const {
  MetricContext m = *this;
  m.multipliers_.push_back(std::move(mult));
  return m;
}

MetricContext MetricContext::scaled(double factor) const {
  if (!(factor > 0.0)) throw ValidationError("MetricContext::scaled: factor must be positive");
  MetricContext m = *this;
  m.scale_ *= factor;
  return m;
}

double MetricContext::multiplier(const Eigen::VectorXcd& z) const {
  double w = scale_;
  for (const auto& f : multipliers_) w *= f(z);
  return w;
}

double MetricContext::length_sq(const Eigen::VectorXcd& v, const Eigen::VectorXcd& z) const {
  double core = 0.0;
  switch (kind_) {
    case Kind::BaseFS:
      core = fs_inner(v, v, z).real() * std::exp(g_.log_factor(z));
      break;
    case Kind::Bergman: {
      LocalFrame frame = frame_at(F_, z);
      Eigen::MatrixXcd col(z.size(), 1);
      col.col(0) = v;
      Complex omega = frame_pairing(F_, frame, z, col);
      Eigen::VectorXcd a = kappa_coefficients(*bd_, z);
      double rho = a.squaredNorm();
      if (!(rho > 1e-280)) throw NumericalError("g_m: base point of the linear system");
      core = std::norm(omega) * std::pow(rho, 1.0 / bd_->m);
      break;
    }
    case Kind::ConstantChart: {
      Complex zc = z[const_chart_];
      double acc = 0.0;
      for (int j = 0; j < z.size(); ++j) {
        if (j == const_chart_) continue;
        acc += std::norm((v[j] * zc - z[j] * v[const_chart_]) / (zc * zc));
      }
      core = const_value_ * acc;
      break;
    }
  }
  return core * multiplier(z);
}

double MetricContext::length(const Eigen::VectorXcd& v, const Eigen::VectorXcd& z) const {
  double s = length_sq(v, z);
  if (!(s >= 0.0)) throw NumericalError("metric: negative squared length");
  return std::sqrt(s);
}

double induced_k_norm_sq_curve(const MetricContext& metric, const HomogeneousPolynomial& F,
                               const ProjectivePoint& pt) {
  if (F.num_vars() != 3)
    throw ValidationError("induced_k_norm_sq_curve: plane curves only");
  FramePlan plan = plan_frame(F, pt);
  Eigen::MatrixXcd basis = adapted_tangent_basis(plan, pt.z);
  LocalFrame frame{plan.chart, plan.solved};
  Complex omega = frame_pairing(F, frame, pt.z, basis);
  double t_len = metric.length_sq(basis.col(0), pt.z);
  if (!(t_len > 0.0)) throw NumericalError("induced_k_norm_sq_curve: degenerate metric");
  return std::norm(omega) / t_len;
}

void save_bergman(const std::string& dir, const std::string& stem, const BergmanData& bd) {
  save_basis(dir + "/" + stem + "_kappa.txt", bd.kappa);
  std::ofstream phi_out(dir + "/" + stem + "_phi.txt");
  if (!phi_out) throw ValidationError("cannot write phi file");
  write_polynomial(phi_out, bd.phi.rep);
  nlohmann::json rec;
  rec["m"] = bd.m;
  rec["dimension"] = bd.kappa.dimension();
  rec["gram_residual"] = bd.gram_residual;
  rec["gram_se_max"] = bd.gram_se_max;
  rec["pool_seed"] = bd.pool_seed;
  rec["pool_points"] = bd.pool_points;
  rec["pool_measure"] = bd.pool_measure;
  rec["phi_power"] = bd.phi.m;
  std::ofstream rec_out(dir + "/" + stem + ".json");
  if (!rec_out) throw ValidationError("cannot write bergman record");
  rec_out << rec.dump(2) << "\n";
}

}  // namespace berglab
