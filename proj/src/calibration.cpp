#include "berglab/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <Eigen/Dense>
#include <json.hpp>

#include "berglab/errors.hpp"
#include "berglab/rng.hpp"

namespace berglab {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double FermatPhi::norm(const ProjectivePoint& pt) const {
  Complex s(0.0, 0.0);
  for (int j = 0; j < pt.num_vars(); ++j) s += pt.z[j] * pt.z[j];
  double ratio = std::abs(s) / pt.z.squaredNorm();
  return std::pow(ratio, k);
}

HomogeneousPolynomial FermatPhi::representative(int num_vars) const {
  HomogeneousPolynomial base(num_vars, 2);
  {
    std::vector<Term> terms;
    for (int j = 0; j < num_vars; ++j) {
      Term t;
      t.exps[j] = 2;
      t.coef = Complex(1.0, 0.0);
      terms.push_back(t);
    }
    base = HomogeneousPolynomial::from_terms(num_vars, 2, std::move(terms));
  }
  HomogeneousPolynomial acc = base;
  for (int j = 1; j < k; ++j) acc = acc.multiply(base);
  return acc;
}

FermatPhi fermat_phi(int k, int n) {
  if (k < 1) throw ValidationError("fermat_phi: k must be >= 1");
  if (n < 1) throw ValidationError("fermat_phi: n must be >= 1");
  return FermatPhi{k};
}

double distance_to_real_locus(const ProjectivePoint& pt) {
  return 0.5 * fs_distance(pt, conjugation(pt));
}

CalibrationReport max_profile(const NormEvaluator& phi_norm, const SamplePool& complex_pool,
                              const SamplePool& real_pool) {
  if (complex_pool.points.empty() || real_pool.points.empty())
    throw ValidationError("max_profile: empty pool");
  CalibrationReport report;
  report.max_complex = 0.0;
  report.max_real = 0.0;
  report.min_real = 1e300;

  std::vector<std::array<double, 2>> near;  // (distance, margin) off L
  for (const auto& p : complex_pool.points) {
    double v = phi_norm(p.pt);
    double dist = distance_to_real_locus(p.pt);
    report.max_complex = std::max(report.max_complex, v);
    report.samples.push_back({dist, v});
    if (dist > 1e-6) near.push_back({dist, 1.0 - v});
  }
  for (const auto& p : real_pool.points) {
    double v = phi_norm(p.pt);
    report.max_real = std::max(report.max_real, v);
    report.min_real = std::min(report.min_real, v);
  }

  // margin histogram over distance bins
  if (!near.empty()) {
    double dmax = 0.0;
    for (const auto& s : near) dmax = std::max(dmax, s[0]);
    const int bins = 24;
    std::vector<double> sum(bins, 0.0);
    std::vector<std::size_t> cnt(bins, 0);
    for (const auto& s : near) {
      int b = std::min(bins - 1, static_cast<int>(bins * s[0] / dmax));
      sum[b] += s[1];
      ++cnt[b];
    }
    for (int b = 0; b < bins; ++b)
      if (cnt[b] > 0) report.margin_curve.push_back({dmax * (b + 0.5) / bins, sum[b] / cnt[b]});
  }

  // log-log fit of margin vs distance on the near-L band
  {
    std::vector<std::array<double, 2>> fitpts;
    for (const auto& s : near)
      if (s[0] > 1e-4 && s[0] < 0.3 && s[1] > 1e-14) fitpts.push_back({std::log(s[0]), std::log(s[1])});
    if (fitpts.size() >= 16) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
      for (const auto& p : fitpts) {
        sx += p[0];
        sy += p[1];
        sxx += p[0] * p[0];
        sxy += p[0] * p[1];
        syy += p[1] * p[1];
      }
      double n = static_cast<double>(fitpts.size());
      double cov = sxy - sx * sy / n;
      double varx = sxx - sx * sx / n;
      double vary = syy - sy * sy / n;
      if (varx > 0 && vary > 0) {
        report.margin_fit_slope = cov / varx;
        report.margin_fit_r2 = (cov * cov) / (varx * vary);
      }
    }
  }

  // strictness: essentially all samples beyond the median distance must have
  // a genuinely positive margin
  {
    std::vector<double> dists;
    for (const auto& s : near) dists.push_back(s[0]);
    if (!dists.empty()) {
      std::nth_element(dists.begin(), dists.begin() + dists.size() / 2, dists.end());
      double dmed = dists[dists.size() / 2];
      std::size_t far_n = 0, far_pos = 0;
      for (const auto& s : near)
        if (s[0] >= dmed) {
          ++far_n;
          if (s[1] > 1e-9) ++far_pos;
        }
      report.strict = far_n > 0 && far_pos >= far_n * 99 / 100;
    }
  }
  return report;
}

double theta_alignment(const std::function<Complex(const ProjectivePoint&)>& frame_value,
                       const SamplePool& real_pool, double* residual) {
  if (real_pool.points.empty()) throw ValidationError("theta_alignment: empty pool");
  std::vector<double> angles;
  Complex mean(0.0, 0.0);
  for (const auto& p : real_pool.points) {
    Complex v = frame_value(p.pt);
    if (!(std::abs(v) > 1e-300))
      throw NumericalError("theta_alignment: section vanishes on the real locus");
    mean += v / std::abs(v);
  }
  if (!(std::abs(mean) > 1e-12))
    throw NumericalError("theta_alignment: phases wrap the full circle");
  double center = std::arg(mean);
  double lo = 0.0, hi = 0.0;
  for (const auto& p : real_pool.points) {
    Complex v = frame_value(p.pt);
    double a = std::arg(v * std::polar(1.0, -center));
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  // midrange minimizes the max deviation once phases sit in a half circle
  double theta = -(center + 0.5 * (lo + hi));
  if (theta > kPi) theta -= 2.0 * kPi;
  if (theta < -kPi) theta += 2.0 * kPi;
  if (residual) *residual = 0.5 * (hi - lo);
  return theta;
}

double frame_determinant_ratio(const Eigen::MatrixXd& packed) {
  const int q = static_cast<int>(packed.cols());
  if (packed.rows() != 2 * q) throw ValidationError("frame_determinant_ratio: expect 2q x q");
  Eigen::MatrixXcd C(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) C(i, j) = Complex(packed(i, j), packed(q + i, j));
  return std::abs(C.determinant());
}

double comass_check(const CanonicalSection& s, const HomogeneousPolynomial& F,
                    const ProjectivePoint& pt, int frame_trials, std::uint64_t seed) {
  if (frame_trials < 1) throw ValidationError("comass_check: need at least one trial");
  TangentFrame fr = tangent_frame(F, pt);
  const int q = static_cast<int>(fr.vectors.cols());
  LocalFrame frame = default_frame(F, pt);
  double omega_h = std::sqrt(frame_h_norm_sq(F, frame, pt));

  Rng rng(seed);
  double best = 0.0;
  for (int trial = 0; trial < frame_trials; ++trial) {
    Eigen::MatrixXd packed(2 * q, q);
    if (trial == 0) {
      // Lagrangian-type frame: the real span of the complex frame itself
      packed.setZero();
      for (int j = 0; j < q; ++j) packed(j, j) = 1.0;
    } else {
      for (int i = 0; i < 2 * q; ++i)
        for (int j = 0; j < q; ++j) packed(i, j) = rng.gaussian();
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(packed);
      Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(2 * q, q);
      packed = Q;
    }
    // real tangent vectors through their (1,0)-parts in the complex frame
    Eigen::MatrixXcd vecs = Eigen::MatrixXcd::Zero(pt.num_vars(), q);
    for (int j = 0; j < q; ++j)
      for (int i = 0; i < q; ++i)
        vecs.col(j) += Complex(packed(i, j), packed(q + i, j)) * fr.vectors.col(i);
    Complex omega_e = frame_pairing(F, frame, pt.z, vecs);
    double ratio = std::abs(omega_e) / omega_h;
    best = std::max(best, std::pow(ratio, s.m));
  }
  return best;
}

void save_calibration(const std::string& dir, const std::string& stem,
                      const CalibrationReport& report) {
  std::ofstream csv(dir + "/" + stem + "_samples.csv");
  if (!csv) throw ValidationError("cannot write calibration CSV");
  csv << "distance_to_L,value\n";
  char buf[80];
  for (const auto& s : report.samples) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", s[0], s[1]);
    csv << buf;
  }
  nlohmann::json man;
  man["section"] = report.section_name;
  man["max_complex"] = report.max_complex;
  man["max_real"] = report.max_real;
  man["min_real"] = report.min_real;
  man["margin_fit_slope"] = report.margin_fit_slope;
  man["margin_fit_r2"] = report.margin_fit_r2;
  man["strict"] = report.strict;
  man["theta"] = report.theta;
  man["theta_residual"] = report.theta_residual;
  nlohmann::json curve = nlohmann::json::array();
  for (const auto& b : report.margin_curve) curve.push_back({b[0], b[1]});
  man["margin_curve"] = curve;
  std::ofstream js(dir + "/" + stem + ".json");
  if (!js) throw ValidationError("cannot write calibration manifest");
  js << man.dump(2) << "\n";
}

}  // namespace berglab
