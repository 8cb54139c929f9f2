#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "berglab/bergman.hpp"

namespace berglab {

// Closed loop on a plane curve M = {F = 0} in CP^2. Vertices are stored as a
// ring (no duplicated endpoint); each segment is interpolated in the chart of
// its first vertex as a graph over the free coordinate, so every point of the
// interpolated path lies on the curve.
struct Loop {
  HomogeneousPolynomial F;
  std::vector<ProjectivePoint> verts;
  double proximity_floor = 0.0;  // recorded for a given phi_m

  std::size_t size() const { return verts.size(); }
  const ProjectivePoint& vertex(std::size_t i) const { return verts[i % verts.size()]; }
};

// Invariants: every vertex on the curve (residual <= 1e-10), adjacent
// vertices within chart overlap. Throws on violation.
void validate_loop(const Loop& loop);

// Every-other-vertex coarsening (for refinement studies).
Loop coarsen(const Loop& loop);

// Ordered loop tracing one connected component of the real locus,
// resampled to `count` vertices roughly equally spaced in FS arclength.
Loop real_locus_loop(const HomogeneousPolynomial& F, std::size_t count);

// Sum of per-segment Simpson quadrature of the metric speed along the
// graph-interpolated path; converges at least at second order in the
// vertex count on smooth loops.
double loop_length(const Loop& loop, const MetricContext& metric);

// The exact g_m on a plane curve: dual of h_m on K = T*M.
MetricContext gm_metric(std::shared_ptr<const BergmanData> bd);

// Continuation state for the 2m-th root xi_m of phi_m along paths.
struct BranchTracker {
  Complex root{1.0, 0.0};          // current root value
  Complex start_root{1.0, 0.0};
  LocalFrame frame{0, 1};          // frame the root is expressed in
  int branch_hops = 0;             // accumulated nearest-branch shifts
  Complex integral{0.0, 0.0};      // accumulated loop integral
  bool fresh = true;
};

// Positive-real initial branch at vertex 0 of a loop on the real locus.
BranchTracker branch_start_on_real_locus(const Loop& loop, const BergmanData& bd);

// Integral of the tracked 2m-th root 1-form around the loop. The tracker is
// advanced through the full loop; non-closure throws MonodromyObstruction
// with the measured defect angle. A fresh tracker requires a real-locus
// start (use branch_start_on_real_locus or continue an existing tracker).
Complex xi_integral(const Loop& loop, const BergmanData& bd, BranchTracker& tracker);

// Continue the tracked root along the on-curve connector between two nearby
// points (used to carry xi_m across homotopy steps).
void continue_branch(const BergmanData& bd, BranchTracker& tracker,
                     const ProjectivePoint& from, const ProjectivePoint& to);

struct Homotopy {
  std::vector<Loop> loops;  // loops[0] is the base loop
  double amplitude = 0.0;
  std::uint64_t seed = 0;
  double guard_floor = 0.0;
  int steps = 0;
};

// Random low-frequency in-curve deformation of `loop`, Newton-projected back
// to the curve; every intermediate loop must keep divisor_proximity(phi_m)
// above guard_floor, else GuardViolation.
Homotopy generate_homotopy(const Loop& loop, const BergmanData& bd, int steps,
                           double amplitude, std::uint64_t seed, double guard_floor);

struct VolumeComparisonReport {
  struct Row {
    double length = 0.0;
    Complex xi{0.0, 0.0};
    double conservation = 0.0;  // |xi - xi_base|
    double margin = 0.0;        // length - base_length
  };
  double base_length = 0.0;
  Complex base_xi{0.0, 0.0};
  double tolerance = 0.0;  // combined quadrature tolerance (absolute)
  std::vector<Row> rows;   // one per homotopy step (excluding the base loop)
  bool pass = false;
};

// Checks length(L_t) >= |int xi| = |int_L xi| = length(L) within the
// combined quadrature tolerance, loop by loop.
VolumeComparisonReport verify_volume_comparison(const Homotopy& h, const BergmanData& bd);

// Max discrete geodesic-curvature magnitude along the loop (conformal-factor
// formula in the local holomorphic coordinate).
double geodesic_curvature_residual(const Loop& loop, const MetricContext& metric);

// sigma-invariant compactly supported conformal factor 1 + amplitude * bump,
// bump profile exp(1 - 1/x) in the normalized cos^2-distance variable.
struct ConformalBump {
  Eigen::VectorXcd center;  // unit representative
  double amplitude = 0.0;
  double q_floor = 0.0;     // cos^2 of the support radius

  double multiplier(const Eigen::VectorXcd& z) const;      // 1 + A * b_sym
  double log_multiplier(const Eigen::VectorXcd& z) const;
  // Ambient complex Hessian of log multiplier (for curvature cross-checks).
  Eigen::MatrixXcd log_dd_bar_ambient(const Eigen::VectorXcd& z) const;
};

ConformalBump make_bump(const ProjectivePoint& center, double amplitude, double radius);

// Metric multiplied by the bump factor. amplitude > -1 keeps it positive.
MetricContext conformal_bump(const MetricContext& metric, const ProjectivePoint& center,
                             double amplitude, double radius);

void save_homotopy(const std::string& dir, const std::string& stem, const Homotopy& h,
                   const VolumeComparisonReport& report);

}  // namespace berglab
