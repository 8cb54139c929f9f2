#include "berglab/homotopy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "berglab/errors.hpp"
#include "berglab/rng.hpp"
#include "berglab/sampling.hpp"

namespace berglab {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_curve(const HomogeneousPolynomial& F, const char* who) {
  if (F.num_vars() != 3)
    throw ValidationError(std::string(who) + ": plane curves only (n = 1)");
}

int free_index_of(const LocalFrame& frame) {
  for (int j = 0; j < 3; ++j)
    if (j != frame.chart && j != frame.solved) return j;
  throw ValidationError("degenerate frame");
}

// One loop segment, interpolated as a graph over the free coordinate of the
// first vertex's frame. All interior points are Newton-projected on the curve.
struct Segment {
  LocalFrame frame;
  int free = 0;
  Complex u_a, u_b;
  Complex s_a, s_b;  // solved coordinate at the endpoints (affine, chart = 1)

  Complex du() const { return u_b - u_a; }
};

Segment make_segment(const HomogeneousPolynomial& F, const ProjectivePoint& va,
                     const ProjectivePoint& vb) {
  FramePlan plan = plan_frame(F, va);
  Segment seg;
  seg.frame = {plan.chart, plan.solved};
  seg.free = free_index_of(seg.frame);
  Complex zca = va.z[plan.chart];
  Complex zcb = vb.z[plan.chart];
  if (std::abs(zcb) < 0.15)
    throw ChartError("segment endpoints not within chart overlap");
  seg.u_a = va.z[seg.free] / zca;
  seg.u_b = vb.z[seg.free] / zcb;
  seg.s_a = va.z[plan.solved] / zca;
  seg.s_b = vb.z[plan.solved] / zcb;
  return seg;
}

// Representative zeta(t) on the curve with zeta[chart] = 1.
Eigen::VectorXcd segment_point(const HomogeneousPolynomial& F, const Segment& seg, double t) {
  Eigen::VectorXcd zeta(3);
  zeta[seg.frame.chart] = Complex(1.0, 0.0);
  zeta[seg.free] = seg.u_a + t * seg.du();
  zeta[seg.frame.solved] = seg.s_a + t * (seg.s_b - seg.s_a);
  if (!newton_resolve_solved(F, seg.frame.solved, zeta))
    throw NumericalError("segment interpolation left the curve");
  return zeta;
}

Eigen::VectorXcd segment_velocity(const HomogeneousPolynomial& F, const Segment& seg,
                                  const Eigen::VectorXcd& zeta) {
  Eigen::VectorXcd grad = F.eval_gradient(zeta);
  Complex gs = grad[seg.frame.solved];
  if (std::abs(gs) < 1e-300) throw ChartError("segment velocity: degenerate solved direction");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(3);
  v[seg.free] = seg.du();
  v[seg.frame.solved] = -grad[seg.free] / gs * seg.du();
  return v;
}

double curve_residual(const HomogeneousPolynomial& F, const ProjectivePoint& pt) {
  return std::abs(F.eval(pt.z)) / std::max(F.coefficient_scale(), 1e-300);
}

Complex phi_coefficient(const BergmanData& bd, const LocalFrame& frame,
                        const Eigen::VectorXcd& z) {
  Complex zc = z[frame.chart];
  return bd.phi.rep.eval(z) / std::pow(zc, bd.phi.rep.degree());
}

Complex continue_root(Complex prev, Complex a, int two_m, int* hop = nullptr) {
  if (!(std::abs(a) > 0.0))
    throw GuardViolation("branch tracking hit a zero of phi_m");
  double r = std::pow(std::abs(a), 1.0 / two_m);
  double base = std::arg(a) / two_m;
  double target = std::arg(prev);
  double step = 2.0 * kPi / two_m;
  long k = std::lround((target - base) / step);
  if (hop) *hop = static_cast<int>(((k % two_m) + two_m) % two_m);
  double ang = base + step * static_cast<double>(k);
  return std::polar(r, ang);
}

// Omega_from(v) / Omega_to(v) at a vertex, for transporting roots between
// residue frames.
Complex frame_transition(const HomogeneousPolynomial& F, const LocalFrame& from,
                         const LocalFrame& to, const ProjectivePoint& pt) {
  FramePlan plan;
  plan.chart = to.chart;
  plan.solved = to.solved;
  plan.gradient = F.eval_gradient(pt.z);
  Eigen::MatrixXcd basis = adapted_tangent_basis(plan, pt.z);
  Complex num = frame_pairing(F, from, pt.z, basis);
  Complex den = frame_pairing(F, to, pt.z, basis);
  if (std::abs(den) < 1e-300) throw ChartError("frame transition: degenerate target frame");
  return num / den;
}

struct XiSpan {
  const BergmanData* bd;
  const HomogeneousPolynomial* F;
  const Segment* seg;
  int two_m;
};

// Simpson quadrature of b(t) Omega(gamma'(t)) over [t0, t1], bisecting until
// the per-span phase change of the phi_m coefficient stays below pi/2.
Complex xi_span(const XiSpan& ctx, double t0, double t1, Complex a0, Complex& b, int depth) {
  double tm = 0.5 * (t0 + t1);
  Eigen::VectorXcd z0 = segment_point(*ctx.F, *ctx.seg, t0);
  Eigen::VectorXcd zm = segment_point(*ctx.F, *ctx.seg, tm);
  Eigen::VectorXcd z1 = segment_point(*ctx.F, *ctx.seg, t1);
  Complex am = phi_coefficient(*ctx.bd, ctx.seg->frame, zm);
  Complex a1 = phi_coefficient(*ctx.bd, ctx.seg->frame, z1);
  if (!(std::abs(am) > 0.0) || !(std::abs(a1) > 0.0))
    throw GuardViolation("branch tracking hit a zero of phi_m");
  double step0 = std::abs(std::arg(am / a0));
  double step1 = std::abs(std::arg(a1 / am));
  if (step0 > 0.5 * kPi || step1 > 0.5 * kPi) {
    if (depth >= 24)
      throw GuardViolation("phase step rule cannot stabilize (divisor too close)");
    Complex left = xi_span(ctx, t0, tm, a0, b, depth + 1);
    Complex right = xi_span(ctx, tm, t1, am, b, depth + 1);
    return left + right;
  }
  Complex b0 = b;
  Complex bm = continue_root(b0, am, ctx.two_m);
  Complex b1 = continue_root(bm, a1, ctx.two_m);
  auto integrand = [&](const Eigen::VectorXcd& z, Complex broot) {
    Eigen::MatrixXcd col(3, 1);
    col.col(0) = segment_velocity(*ctx.F, *ctx.seg, z);
    return broot * frame_pairing(*ctx.F, ctx.seg->frame, z, col);
  };
  Complex g0 = integrand(z0, b0);
  Complex gm = integrand(zm, bm);
  Complex g1 = integrand(z1, b1);
  b = b1;
  return (t1 - t0) * (g0 + 4.0 * gm + g1) / 6.0;
}

}  // namespace

void validate_loop(const Loop& loop) {
  require_curve(loop.F, "validate_loop");
  if (loop.size() < 8) throw ValidationError("loop too short");
  for (std::size_t i = 0; i < loop.size(); ++i) {
    if (curve_residual(loop.F, loop.verts[i]) > 1e-10)
      throw ValidationError("loop vertex off the curve");
    make_segment(loop.F, loop.vertex(i), loop.vertex(i + 1));  // chart overlap
  }
}

Loop coarsen(const Loop& loop) {
  Loop out;
  out.F = loop.F;
  out.proximity_floor = loop.proximity_floor;
  for (std::size_t i = 0; i < loop.size(); i += 2) out.verts.push_back(loop.verts[i]);
  return out;
}

Loop real_locus_loop(const HomogeneousPolynomial& F, std::size_t count) {
  require_curve(F, "real_locus_loop");
  if (count < 8) throw ValidationError("real_locus_loop: count too small");
  SamplePool seedpool = sample_real_locus(F, 32, /*seed=*/0xBE47u);
  ProjectivePoint start = seedpool.points.front().pt;

  const double h = 0.02;  // FS step
  auto real_tangent = [&](const ProjectivePoint& pt) {
    TangentFrame fr = tangent_frame(F, pt);
    Eigen::VectorXcd v = fr.vectors.col(0);
    // rotate the phase so the tangent is real (real curve, real frame)
    double best = -1.0;
    Complex piv(1.0, 0.0);
    for (int j = 0; j < 3; ++j)
      if (std::abs(v[j]) > best) {
        best = std::abs(v[j]);
        piv = v[j];
      }
    v *= std::conj(piv) / std::abs(piv);
    if (v.imag().cwiseAbs().maxCoeff() > 1e-8)
      throw NumericalError("real_locus_loop: tangent not real at a real point");
    return Eigen::VectorXcd(v.real().cast<Complex>());
  };

  // project a real perturbed representative back onto the real locus
  auto project_real = [&](Eigen::VectorXd raw) {
    ProjectivePoint pt = make_point(raw.cast<Complex>());
    FramePlan plan = plan_frame(F, pt);
    Eigen::VectorXcd zeta = pt.z / pt.z[plan.chart];
    if (!newton_resolve_solved(F, plan.solved, zeta))
      throw NumericalError("real_locus_loop: projection failed");
    Eigen::VectorXd rz = zeta.real();
    return make_point(rz.cast<Complex>());
  };

  std::vector<ProjectivePoint> trace;
  trace.push_back(start);
  Eigen::VectorXcd tau = real_tangent(start);
  const std::size_t max_steps = 200000;
  for (std::size_t step = 0; step < max_steps; ++step) {
    const ProjectivePoint& cur = trace.back();
    Eigen::VectorXd predictor = (cur.z + h * tau).real();
    ProjectivePoint next = project_real(predictor);
    Eigen::VectorXcd tau_next = real_tangent(next);
    // keep the orientation consistent across frame sign flips
    if ((tau_next.real().dot(tau.real())) < 0.0) tau_next = -tau_next;
    trace.push_back(next);
    tau = tau_next;
    if (step > 10 && fs_distance(next, start) < 0.75 * h) break;
    if (step + 1 == max_steps)
      throw NumericalError("real_locus_loop: component not found connected");
  }

  // resample to `count` vertices equally spaced in FS arclength
  std::vector<double> cum(trace.size(), 0.0);
  for (std::size_t i = 1; i < trace.size(); ++i)
    cum[i] = cum[i - 1] + fs_distance(trace[i - 1], trace[i]);
  double total = cum.back() + fs_distance(trace.back(), trace.front());
  Loop loop;
  loop.F = F;
  std::size_t src = 0;
  for (std::size_t k = 0; k < count; ++k) {
    double target = total * static_cast<double>(k) / static_cast<double>(count);
    while (src + 1 < trace.size() && cum[src + 1] < target) ++src;
    const ProjectivePoint& a = trace[src];
    const ProjectivePoint& b = trace[std::min(src + 1, trace.size() - 1)];
    double seg_len = std::max(1e-300, (src + 1 < trace.size() ? cum[src + 1] : total) - cum[src]);
    double alpha = std::min(1.0, std::max(0.0, (target - cum[src]) / seg_len));
    Eigen::VectorXd raw = ((1.0 - alpha) * a.z + alpha * b.z).real();
    loop.verts.push_back(project_real(raw));
  }
  validate_loop(loop);
  for (const auto& v : loop.verts)
    if (!is_real_point(v, 1e-10))
      throw NumericalError("real_locus_loop: reality residual too large");
  return loop;
}

double loop_length(const Loop& loop, const MetricContext& metric) {
  double total = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    Segment seg = make_segment(loop.F, loop.vertex(i), loop.vertex(i + 1));
    auto speed = [&](double t) {
      Eigen::VectorXcd z = segment_point(loop.F, seg, t);
      return metric.length(segment_velocity(loop.F, seg, z), z);
    };
    total += (speed(0.0) + 4.0 * speed(0.5) + speed(1.0)) / 6.0;
  }
  return total;
}

MetricContext gm_metric(std::shared_ptr<const BergmanData> bd) {
  return MetricContext::bergman_gm(std::move(bd));
}

BranchTracker branch_start_on_real_locus(const Loop& loop, const BergmanData& bd) {
  require_curve(bd.F, "branch_start_on_real_locus");
  const ProjectivePoint& v0 = loop.verts.front();
  if (!is_real_point(v0, 1e-9))
    throw ValidationError("branch start requires a real-locus loop");
  FramePlan plan = plan_frame(bd.F, v0);
  LocalFrame frame{plan.chart, plan.solved};
  Complex a = phi_coefficient(bd, frame, v0.z);
  if (!(a.real() > 0.0) || std::abs(a.imag()) > 1e-9 * std::abs(a))
    throw NumericalError("phi_m is not positive real at the loop start");
  int two_m = 2 * bd.m;
  double r = std::pow(a.real(), 1.0 / two_m);
  Segment seg0 = make_segment(bd.F, loop.vertex(0), loop.vertex(1));
  Eigen::VectorXcd z0 = v0.z / v0.z[plan.chart];
  Eigen::MatrixXcd col(3, 1);
  col.col(0) = segment_velocity(bd.F, seg0, z0);
  Complex omega = frame_pairing(bd.F, frame, z0, col);
  double sign = (r * omega).real() >= 0.0 ? 1.0 : -1.0;
  BranchTracker tracker;
  tracker.root = sign * r;
  tracker.start_root = tracker.root;
  tracker.frame = frame;
  tracker.fresh = false;
  return tracker;
}

Complex xi_integral(const Loop& loop, const BergmanData& bd, BranchTracker& tracker) {
  require_curve(bd.F, "xi_integral");
  if (tracker.fresh) {
    BranchTracker fresh = branch_start_on_real_locus(loop, bd);
    fresh.integral = tracker.integral;
    tracker = fresh;
  }
  const int two_m = 2 * bd.m;
  Complex b = tracker.root;
  LocalFrame cur = tracker.frame;
  Complex start = b;
  {
    Complex a0 = phi_coefficient(bd, cur, loop.verts.front().z);
    if (std::abs(std::pow(b, two_m) - a0) > 1e-6 * std::abs(a0))
      throw ValidationError("xi_integral: tracker is not positioned at the loop start");
  }
  Complex total(0.0, 0.0);
  for (std::size_t i = 0; i < loop.size(); ++i) {
    Segment seg = make_segment(loop.F, loop.vertex(i), loop.vertex(i + 1));
    if (seg.frame.chart != cur.chart || seg.frame.solved != cur.solved) {
      b *= frame_transition(loop.F, cur, seg.frame, loop.vertex(i));
      cur = seg.frame;
    }
    Eigen::VectorXcd za = segment_point(loop.F, seg, 0.0);
    Complex a0 = phi_coefficient(bd, cur, za);
    XiSpan ctx{&bd, &loop.F, &seg, two_m};
    total += xi_span(ctx, 0.0, 1.0, a0, b, 0);
  }
  if (cur.chart != tracker.frame.chart || cur.solved != tracker.frame.solved) {
    b *= frame_transition(loop.F, cur, tracker.frame, loop.verts.front());
    cur = tracker.frame;
  }
  double defect = std::arg(b / start);
  double quantum = kPi / bd.m;
  if (std::abs(defect) > 0.25 * quantum)
    throw MonodromyObstruction("monodromy obstruction: loop not liftable", defect);
  tracker.root = b;
  tracker.integral += total;
  return total;
}

void continue_branch(const BergmanData& bd, BranchTracker& tracker,
                     const ProjectivePoint& from, const ProjectivePoint& to) {
  require_curve(bd.F, "continue_branch");
  if (tracker.fresh) throw ValidationError("continue_branch: tracker not initialized");
  const int two_m = 2 * bd.m;
  const LocalFrame frame = tracker.frame;
  int free = free_index_of(frame);
  Complex zf = from.z[frame.chart];
  Complex zt = to.z[frame.chart];
  if (std::abs(zt) < 0.15)
    throw ChartError("continue_branch: target outside the tracker chart");
  Segment seg;
  seg.frame = frame;
  seg.free = free;
  seg.u_a = from.z[free] / zf;
  seg.u_b = to.z[free] / zt;
  seg.s_a = from.z[frame.solved] / zf;
  seg.s_b = to.z[frame.solved] / zt;

  std::function<void(double, double, Complex, int)> walk = [&](double t0, double t1, Complex a0,
                                                               int depth) {
    double tm = 0.5 * (t0 + t1);
    Eigen::VectorXcd zm = segment_point(bd.F, seg, tm);
    Eigen::VectorXcd z1 = segment_point(bd.F, seg, t1);
    Complex am = phi_coefficient(bd, frame, zm);
    Complex a1 = phi_coefficient(bd, frame, z1);
    if (std::abs(std::arg(am / a0)) > 0.5 * kPi || std::abs(std::arg(a1 / am)) > 0.5 * kPi) {
      if (depth >= 24) throw GuardViolation("continue_branch: phase step rule failed");
      walk(t0, tm, a0, depth + 1);
      Complex amid = phi_coefficient(bd, frame, segment_point(bd.F, seg, tm));
      walk(tm, t1, amid, depth + 1);
      return;
    }
    tracker.root = continue_root(tracker.root, am, two_m, &tracker.branch_hops);
    tracker.root = continue_root(tracker.root, a1, two_m, &tracker.branch_hops);
  };
  Complex a_from = phi_coefficient(bd, frame, from.z);
  walk(0.0, 1.0, a_from, 0);
}

Homotopy generate_homotopy(const Loop& loop, const BergmanData& bd, int steps,
                           double amplitude, std::uint64_t seed, double guard_floor) {
  require_curve(bd.F, "generate_homotopy");
  if (steps < 1) throw ValidationError("generate_homotopy: steps must be >= 1");
  if (amplitude < 0.0) throw ValidationError("generate_homotopy: negative amplitude");
  const std::size_t n = loop.size();

  auto guard_check = [&](const Loop& l, int step_index) {
    double floor_seen = 1e300;
    for (const auto& v : l.verts)
      floor_seen = std::min(floor_seen, divisor_proximity(bd.phi, v));
    if (floor_seen <= guard_floor)
      throw GuardViolation("homotopy crosses divisor neighbourhood (step " +
                           std::to_string(step_index) + ", proximity " +
                           std::to_string(floor_seen) + ")");
    return floor_seen;
  };

  Homotopy h;
  h.amplitude = amplitude;
  h.seed = seed;
  h.guard_floor = guard_floor;
  h.steps = steps;
  Loop base = loop;
  base.proximity_floor = guard_check(base, 0);
  h.loops.push_back(base);

  // 3-term trigonometric displacement field in the free chart coordinate
  Rng rng(seed);
  std::vector<Complex> cos_coef(3), sin_coef(3);
  for (int k = 0; k < 3; ++k) {
    cos_coef[k] = rng.complex_gaussian() / std::sqrt(static_cast<double>(k + 1));
    sin_coef[k] = rng.complex_gaussian() / std::sqrt(static_cast<double>(k + 1));
  }
  std::vector<Complex> field(n);
  double sup = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double tau = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
    Complex f(0.0, 0.0);
    for (int k = 0; k < 3; ++k)
      f += cos_coef[k] * std::cos((k + 1) * tau) + sin_coef[k] * std::sin((k + 1) * tau);
    field[i] = f;
    sup = std::max(sup, std::abs(f));
  }
  if (sup > 0.0)
    for (auto& f : field) f *= amplitude / sup;

  // each vertex deforms in its own original frame; the solved coordinate is
  // re-solved from the previous step's position (5 Newton steps, 1e-11)
  std::vector<FramePlan> plans;
  std::vector<int> frees;
  std::vector<Eigen::VectorXcd> prev(n);
  for (std::size_t i = 0; i < n; ++i) {
    FramePlan plan = plan_frame(loop.F, loop.verts[i]);
    plans.push_back(plan);
    frees.push_back(free_index_of({plan.chart, plan.solved}));
    prev[i] = loop.verts[i].z / loop.verts[i].z[plan.chart];
  }
  for (int j = 1; j <= steps; ++j) {
    double t = static_cast<double>(j) / static_cast<double>(steps);
    Loop lt;
    lt.F = loop.F;
    for (std::size_t i = 0; i < n; ++i) {
      Eigen::VectorXcd zeta = prev[i];
      zeta[frees[i]] = loop.verts[i].z[frees[i]] / loop.verts[i].z[plans[i].chart] + t * field[i];
      if (!newton_resolve_solved(loop.F, plans[i].solved, zeta, /*max_iters=*/5,
                                 /*tol=*/1e-11))
        throw NumericalError("generate_homotopy: Newton projection failed");
      prev[i] = zeta;
      lt.verts.push_back(make_point(zeta));
    }
    validate_loop(lt);
    lt.proximity_floor = guard_check(lt, j);
    h.loops.push_back(std::move(lt));
  }
  return h;
}

VolumeComparisonReport verify_volume_comparison(const Homotopy& h, const BergmanData& bd) {
  if (h.loops.empty()) throw ValidationError("verify_volume_comparison: empty homotopy");
  MetricContext gm = gm_metric(std::make_shared<const BergmanData>(bd));
  const Loop& base = h.loops.front();

  VolumeComparisonReport report;
  BranchTracker tracker = branch_start_on_real_locus(base, bd);
  report.base_xi = xi_integral(base, bd, tracker);
  report.base_length = loop_length(base, gm);

  // Richardson estimate of the quadrature error from a half-resolution pass
  Loop half = coarsen(base);
  BranchTracker half_tracker = branch_start_on_real_locus(half, bd);
  Complex half_xi = xi_integral(half, bd, half_tracker);
  double half_len = loop_length(half, gm);
  double err_est = std::abs(report.base_length - half_len) / 15.0 +
                   std::abs(report.base_xi - half_xi) / 15.0;
  report.tolerance = 10.0 * err_est + 5.0 * std::abs(report.base_xi - Complex(report.base_length)) +
                     1e-13 * report.base_length;

  bool ok = std::abs(report.base_xi - Complex(report.base_length)) <= report.tolerance;
  ProjectivePoint anchor = base.verts.front();
  for (std::size_t j = 1; j < h.loops.size(); ++j) {
    const Loop& lt = h.loops[j];
    continue_branch(bd, tracker, anchor, lt.verts.front());
    anchor = lt.verts.front();
    VolumeComparisonReport::Row row;
    row.xi = xi_integral(lt, bd, tracker);
    row.length = loop_length(lt, gm);
    row.conservation = std::abs(row.xi - report.base_xi);
    row.margin = row.length - report.base_length;
    ok = ok && row.conservation <= report.tolerance && row.margin >= -report.tolerance;
    report.rows.push_back(row);
  }
  report.pass = ok;
  return report;
}

double geodesic_curvature_residual(const Loop& loop, const MetricContext& metric) {
  require_curve(loop.F, "geodesic_curvature_residual");
  if (loop.size() < 32) throw ValidationError("geodesic_curvature_residual: need >= 32 vertices");

  double worst = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const ProjectivePoint& vm = loop.vertex(i + loop.size() - 1);
    const ProjectivePoint& v0 = loop.vertex(i);
    const ProjectivePoint& vp = loop.vertex(i + 1);
    FramePlan plan = plan_frame(loop.F, v0);
    LocalFrame frame{plan.chart, plan.solved};
    int free = free_index_of(frame);
    auto coord = [&](const ProjectivePoint& p) {
      Complex zc = p.z[frame.chart];
      if (std::abs(zc) < 0.15) throw ChartError("geodesic residual: neighbour outside chart");
      return p.z[free] / zc;
    };
    Complex pm = coord(vm), p0 = coord(v0), pp = coord(vp);
    Complex d1 = p0 - pm, d2 = pp - p0, d3 = pp - pm;
    double l1 = std::abs(d1), l2 = std::abs(d2), l3 = std::abs(d3);
    if (l1 < 1e-14 || l2 < 1e-14 || l3 < 1e-14)
      throw NumericalError("geodesic residual: coincident vertices");
    double cross = d1.real() * d2.imag() - d1.imag() * d2.real();
    double kappa_e = 2.0 * cross / (l1 * l2 * l3);

    Complex tangent = d3 / l3;
    Complex normal = Complex(0.0, 1.0) * tangent;
    Complex s0 = v0.z[plan.solved] / v0.z[frame.chart];
    auto lambda = [&](Complex u) {
      Eigen::VectorXcd zeta(3);
      zeta[frame.chart] = Complex(1.0, 0.0);
      zeta[free] = u;
      zeta[plan.solved] = s0;
      if (!newton_resolve_solved(loop.F, plan.solved, zeta))
        throw NumericalError("geodesic residual: projection failed");
      Eigen::VectorXcd grad = loop.F.eval_gradient(zeta);
      Eigen::VectorXcd tv = Eigen::VectorXcd::Zero(3);
      tv[free] = Complex(1.0, 0.0);
      tv[plan.solved] = -grad[free] / grad[plan.solved];
      return metric.length_sq(tv, zeta);
    };
    double hstep = 1e-4 * (1.0 + std::abs(p0));
    double dlog = (std::log(lambda(p0 + hstep * normal)) - std::log(lambda(p0 - hstep * normal))) /
                  (2.0 * hstep);
    double kg = (kappa_e + 0.5 * dlog) / std::sqrt(lambda(p0));
    worst = std::max(worst, std::abs(kg));
  }
  return worst;
}

double ConformalBump::multiplier(const Eigen::VectorXcd& z) const {
  auto one_center = [&](const Eigen::VectorXcd& c) {
    Complex g = (z.array() * c.conjugate().array()).sum();
    double q = std::norm(g) / z.squaredNorm();
    double x = (q - q_floor) / (1.0 - q_floor);
    if (x <= 0.0) return 0.0;
    return std::exp(1.0 - 1.0 / x);
  };
  double b_sym = 0.5 * (one_center(center) + one_center(center.conjugate()));
  return 1.0 + amplitude * b_sym;
}

double ConformalBump::log_multiplier(const Eigen::VectorXcd& z) const {
  return std::log(multiplier(z));
}

Eigen::MatrixXcd ConformalBump::log_dd_bar_ambient(const Eigen::VectorXcd& z) const {
  const int n = static_cast<int>(z.size());
  double S = z.squaredNorm();

  Eigen::VectorXcd du_total = Eigen::VectorXcd::Zero(n);
  Eigen::MatrixXcd Hu_total = Eigen::MatrixXcd::Zero(n, n);
  double u_total = 0.0;

  auto accumulate = [&](const Eigen::VectorXcd& c) {
    Complex G = (z.array() * c.conjugate().array()).sum();
    double N = std::norm(G);
    double q = N / S;
    double x = (q - q_floor) / (1.0 - q_floor);
    if (x <= 0.0) return;
    double B = std::exp(1.0 - 1.0 / x);
    double Bp = B / (x * x);
    double Bpp = B * (1.0 / (x * x * x * x) - 2.0 / (x * x * x));

    Eigen::VectorXcd dq(n);
    for (int a = 0; a < n; ++a)
      dq[a] = (std::conj(c[a]) * std::conj(G) * S - N * std::conj(z[a])) / (S * S);
    Eigen::MatrixXcd Hq(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        Complex val = std::conj(c[a]) * c[b] / S -
                      std::conj(c[a]) * std::conj(G) * z[b] / (S * S) -
                      G * c[b] * std::conj(z[a]) / (S * S) +
                      2.0 * N * std::conj(z[a]) * z[b] / (S * S * S);
        if (a == b) val -= N / (S * S);
        Hq(a, b) = val;
      }
    double scale = 1.0 / (1.0 - q_floor);
    Eigen::VectorXcd dx = dq * scale;
    Eigen::MatrixXcd Hx = Hq * scale;
    u_total += 0.5 * amplitude * B;
    du_total += 0.5 * amplitude * Bp * dx;
    Hu_total += 0.5 * amplitude * (Bp * Hx + Bpp * (dx * dx.adjoint()));
  };
  accumulate(center);
  accumulate(center.conjugate());

  double w = 1.0 + u_total;
  return Hu_total / w - (du_total * du_total.adjoint()) / (w * w);
}

ConformalBump make_bump(const ProjectivePoint& center, double amplitude, double radius) {
  if (!(amplitude > -1.0)) throw ValidationError("conformal_bump: amplitude must be > -1");
  if (!(radius > 0.0) || radius >= 0.5 * kPi)
    throw ValidationError("conformal_bump: radius must lie in (0, pi/2)");
  ConformalBump bump;
  bump.center = center.z;
  bump.amplitude = amplitude;
  double cr = std::cos(radius);
  bump.q_floor = cr * cr;
  return bump;
}

MetricContext conformal_bump(const MetricContext& metric, const ProjectivePoint& center,
                             double amplitude, double radius) {
  ConformalBump bump = make_bump(center, amplitude, radius);
  return metric.with_multiplier(
      [bump](const Eigen::VectorXcd& z) { return bump.multiplier(z); });
}

void save_homotopy(const std::string& dir, const std::string& stem, const Homotopy& h,
                   const VolumeComparisonReport& report) {
  std::ofstream csv(dir + "/" + stem + "_trace.csv");
  if (!csv) throw ValidationError("cannot write homotopy trace");
  csv << "step,vertex,re0,im0,re1,im1,re2,im2\n";
  char buf[160];
  for (std::size_t s = 0; s < h.loops.size(); ++s) {
    const Loop& l = h.loops[s];
    for (std::size_t i = 0; i <= l.size(); ++i) {  // first = last in the file
      const ProjectivePoint& v = l.vertex(i % l.size());
      std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s, i,
                    v.z[0].real(), v.z[0].imag(), v.z[1].real(), v.z[1].imag(), v.z[2].real(),
                    v.z[2].imag());
      csv << buf;
    }
  }
  nlohmann::json man;
  man["seed"] = h.seed;
  man["amplitude"] = h.amplitude;
  man["guard_floor"] = h.guard_floor;
  man["steps"] = h.steps;
  man["base_length"] = report.base_length;
  man["base_xi_re"] = report.base_xi.real();
  man["base_xi_im"] = report.base_xi.imag();
  man["tolerance"] = report.tolerance;
  man["pass"] = report.pass;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    nlohmann::json row;
    row["length"] = r.length;
    row["xi_re"] = r.xi.real();
    row["xi_im"] = r.xi.imag();
    row["conservation"] = r.conservation;
    row["margin"] = r.margin;
    rows.push_back(row);
  }
  man["rows"] = rows;
  std::ofstream js(dir + "/" + stem + ".json");
  if (!js) throw ValidationError("cannot write homotopy manifest");
  js << man.dump(2) << "\n";
}

}  // namespace berglab
