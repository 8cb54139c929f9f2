#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "berglab/bergman.hpp"

namespace berglab {

// Pointwise |phi| in [0, 1] (bundle-norm evaluators are always fed through
// ratio forms, so 1 is the calibration bound).
using NormEvaluator = std::function<double(const ProjectivePoint&)>;

// The Fermat section (sum z_i^2)^k of (gamma^*)^{2k} with the standard
// ambient metric: |phi|(z) = (|sum z_i^2| / sum |z_i|^2)^k.
struct FermatPhi {
  int k = 1;
  double norm(const ProjectivePoint& pt) const;
  // representative polynomial (sum z^2)^k, usable as a canonical-section
  // representative whenever 2k = m (d - n - 1) on the hypersurface at hand
  HomogeneousPolynomial representative(int num_vars) const;
};

FermatPhi fermat_phi(int k, int n);

// Distance-to-L proxy: half the FS distance from z to its conjugate.
double distance_to_real_locus(const ProjectivePoint& pt);

struct CalibrationReport {
  std::string section_name;
  double max_complex = 0.0;
  double max_real = 0.0;
  double min_real = 0.0;
  // least-squares fit of log(margin) vs log(distance) near L
  double margin_fit_slope = 0.0;
  double margin_fit_r2 = 0.0;
  bool strict = false;
  std::vector<std::array<double, 2>> margin_curve;  // (bin center, mean margin)
  // per-sample rows for CSV export: distance, value
  std::vector<std::array<double, 2>> samples;
  double theta = 0.0;
  double theta_residual = 0.0;
};

// Empirical maxima, equality-on-L residual and the strictness margin curve.
CalibrationReport max_profile(const NormEvaluator& phi_norm, const SamplePool& complex_pool,
                              const SamplePool& real_pool);

// Phase aligning the section's frame values to positive real across the real
// locus; returns theta, writes the max angular deviation into *residual.
double theta_alignment(const std::function<Complex(const ProjectivePoint&)>& frame_value,
                       const SamplePool& real_pool, double* residual);

// Max over random orthonormal real tangent frames of
// |phi(e_1..e_q)| / |phi|_h(pt). Never exceeds 1 (Hadamard bound); the
// supremum is attained on Lagrangian-type frames (included as trial 0).
double comass_check(const CanonicalSection& s, const HomogeneousPolynomial& F,
                    const ProjectivePoint& pt, int frame_trials, std::uint64_t seed);

// |det(A + iB)| for orthonormal real 2q-frames packed as [A; B]: the linear
// algebra core of the comass bound, exposed for the flat-model tests.
double frame_determinant_ratio(const Eigen::MatrixXd& packed);

void save_calibration(const std::string& dir, const std::string& stem,
                      const CalibrationReport& report);

}  // namespace berglab
