#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "berglab/projective.hpp"

namespace berglab {

enum class Locus { Complex, Real };

struct PoolPoint {
  ProjectivePoint pt;
  double weight = 0.0;
};

// Weighted point cloud on a hypersurface (or its real locus), produced by
// intersecting invariantly distributed projective lines with the locus.
// Uniform weights are scaled so the weight sum estimates the total
// Fubini-Study measure (Crofton).
struct SamplePool {
  int num_vars = 0;
  Locus locus = Locus::Complex;
  std::uint64_t seed = 0;
  std::vector<PoolPoint> points;
  double total_measure = 0.0;  // == sum of weights
  double measure_se = 0.0;     // Monte-Carlo standard error of total_measure
  double residual_max = 0.0;   // max |F| / coefficient scale over points
  std::size_t lines_used = 0;
  std::size_t rejected = 0;    // dropped roots (polish failure / near-singular)

  double weight_sum() const;
};

// Crofton constants: expected measure contributed per sampled line is
// measure / c, calibrated on a hyperplane (exactly one hit per line).
double crofton_constant_complex(int num_vars);  // vol CP^{n-1}
double crofton_constant_real(int num_vars);     // vol RP^{n-1}

// Points distributed by the FS-restricted volume measure of {F = 0}.
// For real F the pool is conjugation-symmetric by construction (lines are
// processed together with their conjugates).
SamplePool sample_complex_locus(const HomogeneousPolynomial& F, std::size_t count,
                                std::uint64_t seed);

// Points on the real locus, distributed by its induced length/area measure.
// Throws EmptyRealLocusError when a pilot budget of lines finds no real
// intersection.
SamplePool sample_real_locus(const HomogeneousPolynomial& F, std::size_t count,
                             std::uint64_t seed);

// Roots t of F(A + tB) = 0 (companion matrix + Newton polish). Returns false
// when the line is degenerate for this purpose (leading coefficient ~ 0).
bool roots_on_line(const HomogeneousPolynomial& F, const Eigen::VectorXcd& A,
                   const Eigen::VectorXcd& B, std::vector<Complex>& roots);

// Connected-component count of the pool under a pairwise-linking heuristic:
// points are linked when their FS distance is below link_factor times the
// median nearest-neighbour distance times log(n) (the extreme-gap scale of a
// uniform sample).
int connected_components(const SamplePool& pool, double link_factor = 3.0);

void save_pool_csv(const std::string& path, const SamplePool& pool);
SamplePool load_pool_csv(const std::string& path);

}  // namespace berglab
