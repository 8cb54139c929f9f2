#include "berglab/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "berglab/errors.hpp"
#include "berglab/parallel.hpp"
#include "berglab/rng.hpp"

namespace berglab {

namespace {

constexpr std::size_t kLinesPerChunk = 128;
constexpr double kPi = 3.14159265358979323846;

double tgamma_half_int(int twice) {
  // Gamma(twice/2) for small positive arguments
  return std::tgamma(0.5 * twice);
}

struct LineSample {
  Eigen::VectorXcd A, B;  // orthonormal span of the 2-plane
};

LineSample random_complex_line(Rng& rng, int n) {
  for (;;) {
    Eigen::VectorXcd A(n), B(n);
    for (int j = 0; j < n; ++j) A[j] = rng.complex_gaussian();
    for (int j = 0; j < n; ++j) B[j] = rng.complex_gaussian();
    double na = A.norm();
    if (na < 1e-8) continue;
    A /= na;
    B -= A.dot(B) * A;  // A.dot(B) = <B, A> conj-linear in A
    double nb = B.norm();
    if (nb < 1e-8) continue;
    B /= nb;
    return {A, B};
  }
}

LineSample random_real_line(Rng& rng, int n) {
  for (;;) {
    Eigen::VectorXd A(n), B(n);
    for (int j = 0; j < n; ++j) A[j] = rng.gaussian();
    for (int j = 0; j < n; ++j) B[j] = rng.gaussian();
    double na = A.norm();
    if (na < 1e-8) continue;
    A /= na;
    B -= A.dot(B) * A;
    double nb = B.norm();
    if (nb < 1e-8) continue;
    B /= nb;
    return {A.cast<Complex>(), B.cast<Complex>()};
  }
}

// Coefficients of t -> F(A + tB), degree <= d, by DFT interpolation on the
// (d+1)-st roots of unity (exact for polynomials of this degree).
Eigen::VectorXcd line_restriction_coeffs(const HomogeneousPolynomial& F,
                                         const Eigen::VectorXcd& A,
                                         const Eigen::VectorXcd& B) {
  const int d = F.degree();
  const int m = d + 1;
  Eigen::VectorXcd values(m);
  for (int k = 0; k < m; ++k) {
    double a = 2.0 * kPi * k / m;
    Complex t(std::cos(a), std::sin(a));
    values[k] = F.eval(A + t * B);
  }
  Eigen::VectorXcd coeffs(m);
  for (int j = 0; j < m; ++j) {
    Complex acc(0.0, 0.0);
    for (int k = 0; k < m; ++k) {
      double a = -2.0 * kPi * j * k / m;
      acc += values[k] * Complex(std::cos(a), std::sin(a));
    }
    coeffs[j] = acc / static_cast<double>(m);
  }
  return coeffs;
}

Complex horner(const Eigen::VectorXcd& c, Complex t) {
  Complex acc(0.0, 0.0);
  for (int j = static_cast<int>(c.size()) - 1; j >= 0; --j) acc = acc * t + c[j];
  return acc;
}

Complex horner_deriv(const Eigen::VectorXcd& c, Complex t) {
  Complex acc(0.0, 0.0);
  for (int j = static_cast<int>(c.size()) - 1; j >= 1; --j)
    acc = acc * t + static_cast<double>(j) * c[j];
  return acc;
}

double residual_scale(const Eigen::VectorXcd& c, double abs_t) {
  double s = 0.0, p = 1.0;
  for (int j = 0; j < c.size(); ++j) {
    s += std::abs(c[j]) * p;
    p *= abs_t;
  }
  return std::max(s, 1e-300);
}

bool polish_root(const Eigen::VectorXcd& c, Complex& t) {
  for (int it = 0; it < 40; ++it) {
    Complex p = horner(c, t);
    if (std::abs(p) <= 1e-13 * residual_scale(c, std::abs(t))) return true;
    Complex dp = horner_deriv(c, t);
    if (std::abs(dp) < 1e-300) break;
    t -= p / dp;
  }
  return std::abs(horner(c, t)) <= 1e-12 * residual_scale(c, std::abs(t));
}

bool polish_root_real(const Eigen::VectorXcd& c, double& t) {
  auto eval = [&](double x) {
    double acc = 0.0;
    for (int j = static_cast<int>(c.size()) - 1; j >= 0; --j) acc = acc * x + c[j].real();
    return acc;
  };
  auto deriv = [&](double x) {
    double acc = 0.0;
    for (int j = static_cast<int>(c.size()) - 1; j >= 1; --j) acc = acc * x + j * c[j].real();
    return acc;
  };
  for (int it = 0; it < 40; ++it) {
    double p = eval(t);
    if (std::abs(p) <= 1e-13 * residual_scale(c, std::abs(t))) return true;
    double dp = deriv(t);
    if (std::abs(dp) < 1e-300) break;
    t -= p / dp;
  }
  return std::abs(eval(t)) <= 1e-12 * residual_scale(c, std::abs(t));
}

std::vector<Complex> companion_roots(const Eigen::VectorXcd& c) {
  int d = static_cast<int>(c.size()) - 1;
  while (d > 0 && std::abs(c[d]) == 0.0) --d;
  if (d <= 0) return {};
  if (d == 1) return {-c[0] / c[1]};
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(d, d);
  for (int j = 0; j < d; ++j) comp(j, d - 1) = -c[j] / c[d];
  for (int j = 1; j < d; ++j) comp(j, j - 1) = Complex(1.0, 0.0);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, /*computeEigenvectors=*/false);
  std::vector<Complex> roots(d);
  for (int j = 0; j < d; ++j) roots[j] = es.eigenvalues()[j];
  return roots;
}

struct ChunkResult {
  std::vector<PoolPoint> points;
  std::vector<double> line_hits;  // per line (or per conjugate pair)
  std::size_t rejected = 0;
  double residual_max = 0.0;
};

// Accepts a root point: gauge, residual bookkeeping, singularity rejection.
bool accept_point(const HomogeneousPolynomial& F, Eigen::VectorXcd raw,
                  ChunkResult& out, ProjectivePoint& pt_out) {
  ProjectivePoint pt = make_point(std::move(raw));
  double res = std::abs(F.eval(pt.z)) / std::max(F.coefficient_scale(), 1e-300);
  if (res > 1e-10) {
    ++out.rejected;
    return false;
  }
  try {
    plan_frame(F, pt);  // rejects near-singular samples
  } catch (const NumericalError&) {
    ++out.rejected;
    return false;
  }
  out.residual_max = std::max(out.residual_max, res);
  pt_out = std::move(pt);
  return true;
}

}  // namespace

double SamplePool::weight_sum() const {
  double s = 0.0;
  for (const auto& p : points) s += p.weight;
  return s;
}

double crofton_constant_complex(int num_vars) {
  // vol(CP^{n-1}) = pi^{n-1} / (n-1)!  with n = num_vars - 1
  int n = num_vars - 1;
  double v = 1.0;
  for (int k = 1; k <= n - 1; ++k) v *= kPi / k;
  return v;
}

double crofton_constant_real(int num_vars) {
  // vol(RP^{n-1}) = vol(S^{n-1}) / 2 = pi^{n/2} / Gamma(n/2), n = num_vars - 1
  int n = num_vars - 1;
  return std::pow(kPi, 0.5 * n) / tgamma_half_int(n);
}

bool roots_on_line(const HomogeneousPolynomial& F, const Eigen::VectorXcd& A,
                   const Eigen::VectorXcd& B, std::vector<Complex>& roots) {
  Eigen::VectorXcd c = line_restriction_coeffs(F, A, B);
  double cmax = c.cwiseAbs().maxCoeff();
  if (cmax <= 0.0) return false;
  if (std::abs(c[F.degree()]) < 1e-8 * cmax) return false;  // line through M at infinity
  roots = companion_roots(c);
  for (auto& t : roots)
    if (!polish_root(c, t)) return false;
  return static_cast<int>(roots.size()) == F.degree();
}

SamplePool sample_complex_locus(const HomogeneousPolynomial& F, std::size_t count,
                                std::uint64_t seed) {
  const int nv = F.num_vars();
  if (nv < 3) throw ValidationError("sample_complex_locus: need at least 3 variables");
  if (count == 0) throw ValidationError("sample_complex_locus: count must be positive");
  const int d = F.degree();
  const bool pair_sigma = F.is_real(1e-14);
  const std::size_t roots_per_unit = pair_sigma ? 2 * d : d;
  const std::size_t units = (count + roots_per_unit - 1) / roots_per_unit;
  const std::size_t chunks = (units + kLinesPerChunk - 1) / kLinesPerChunk;

  std::vector<ChunkResult> results(chunks);
  parallel_chunks(chunks, [&](std::size_t ci) {
    Rng rng = Rng::for_chunk(seed, ci);
    ChunkResult& out = results[ci];
    std::size_t begin = ci * kLinesPerChunk;
    std::size_t end = std::min(units, begin + kLinesPerChunk);
    for (std::size_t u = begin; u < end; ++u) {
      std::vector<Complex> roots;
      LineSample line;
      int attempts = 0;
      while (!roots_on_line(F, (line = random_complex_line(rng, nv)).A, line.B, roots)) {
        if (++attempts > 64)
          throw QuadratureError("sample_complex_locus: persistent root-finding failure");
      }
      double hits = 0.0;
      for (Complex t : roots) {
        ProjectivePoint pt;
        if (!accept_point(F, line.A + t * line.B, out, pt)) continue;
        if (pair_sigma) {
          // the conjugate line's roots are exactly the conjugate points
          ProjectivePoint cpt = conjugation(pt);
          out.points.push_back({std::move(pt), 0.0});
          out.points.push_back({std::move(cpt), 0.0});
          hits += 2.0;
        } else {
          out.points.push_back({std::move(pt), 0.0});
          hits += 1.0;
        }
      }
      out.line_hits.push_back(hits);
    }
  });

  const std::size_t total_lines = units * (pair_sigma ? 2 : 1);
  const double c_crofton = crofton_constant_complex(nv);
  const double w = c_crofton / static_cast<double>(total_lines);

  SamplePool pool;
  pool.num_vars = nv;
  pool.locus = Locus::Complex;
  pool.seed = seed;
  pool.lines_used = total_lines;
  std::vector<double> unit_contrib;
  for (auto& r : results) {
    for (auto& p : r.points) {
      p.weight = w;
      pool.points.push_back(std::move(p));
    }
    for (double h : r.line_hits) unit_contrib.push_back(w * h);
    pool.rejected += r.rejected;
    pool.residual_max = std::max(pool.residual_max, r.residual_max);
  }
  pool.total_measure = std::accumulate(unit_contrib.begin(), unit_contrib.end(), 0.0);
  if (unit_contrib.size() > 1) {
    double mean = pool.total_measure / unit_contrib.size();
    double var = 0.0;
    for (double x : unit_contrib) var += (x - mean) * (x - mean);
    var /= (unit_contrib.size() - 1);
    pool.measure_se = std::sqrt(var * unit_contrib.size());
  }
  return pool;
}

SamplePool sample_real_locus(const HomogeneousPolynomial& F, std::size_t count,
                             std::uint64_t seed) {
  const int nv = F.num_vars();
  if (nv < 3) throw ValidationError("sample_real_locus: need at least 3 variables");
  if (count == 0) throw ValidationError("sample_real_locus: count must be positive");
  if (!F.is_real(1e-14))
    throw ValidationError("sample_real_locus: polynomial must have real coefficients");
  const int d = F.degree();

  auto process_lines = [&](std::size_t first_chunk, std::size_t n_chunks,
                           std::size_t lines_per_chunk) {
    std::vector<ChunkResult> results(n_chunks);
    parallel_chunks(n_chunks, [&](std::size_t ci) {
      Rng rng = Rng::for_chunk(seed, first_chunk + ci);
      ChunkResult& out = results[ci];
      for (std::size_t l = 0; l < lines_per_chunk; ++l) {
        LineSample line = random_real_line(rng, nv);
        Eigen::VectorXcd c = line_restriction_coeffs(F, line.A, line.B);
        double cmax = c.cwiseAbs().maxCoeff();
        double hits = 0.0;
        if (cmax > 0.0 && std::abs(c[d]) >= 1e-8 * cmax) {
          std::vector<Complex> roots = companion_roots(c);
          std::vector<double> reals;
          for (Complex t : roots) {
            if (std::abs(t.imag()) > 1e-6 * (1.0 + std::abs(t))) continue;
            double x = t.real();
            if (!polish_root_real(c, x)) continue;
            reals.push_back(x);
          }
          std::sort(reals.begin(), reals.end());
          reals.erase(std::unique(reals.begin(), reals.end(),
                                  [](double a, double b) {
                                    return std::abs(a - b) <= 1e-8 * (1.0 + std::abs(a));
                                  }),
                      reals.end());
          for (double x : reals) {
            Eigen::VectorXcd raw = line.A + Complex(x, 0.0) * line.B;
            raw = raw.real().cast<Complex>();  // exact reality
            ProjectivePoint pt;
            if (!accept_point(F, std::move(raw), out, pt)) continue;
            out.points.push_back({std::move(pt), 0.0});
            hits += 1.0;
          }
        }
        out.line_hits.push_back(hits);
      }
    });
    return results;
  };

  // Pilot run: estimate the hit rate, detect an empty or elusive real locus.
  const std::size_t pilot_chunks = 4;
  auto pilot = process_lines(0, pilot_chunks, kLinesPerChunk);
  std::size_t pilot_hits = 0;
  for (const auto& r : pilot) pilot_hits += r.points.size();
  if (pilot_hits == 0) {
    // retry budget before declaring the locus empty
    auto retry = process_lines(pilot_chunks, 8, kLinesPerChunk);
    std::size_t retry_hits = 0;
    for (const auto& r : retry) retry_hits += r.points.size();
    if (retry_hits == 0)
      throw EmptyRealLocusError("sample_real_locus: empty or elusive real locus");
    for (auto& r : retry) pilot.push_back(std::move(r));
    pilot_hits += retry_hits;
  }
  const std::size_t pilot_total_lines = pilot.size() * kLinesPerChunk;
  double rate = static_cast<double>(pilot_hits) / pilot_total_lines;
  std::size_t remaining =
      count > pilot_hits ? static_cast<std::size_t>((count - pilot_hits) / std::max(rate, 1e-3)) : 0;
  std::size_t main_chunks = (remaining + kLinesPerChunk - 1) / kLinesPerChunk;
  main_chunks = std::min<std::size_t>(main_chunks, 1 + 256 * count / kLinesPerChunk);
  auto main = process_lines(pilot.size(), main_chunks, kLinesPerChunk);

  std::vector<ChunkResult> results = std::move(pilot);
  for (auto& r : main) results.push_back(std::move(r));

  std::size_t total_lines = results.size() * kLinesPerChunk;
  const double w = crofton_constant_real(nv) / static_cast<double>(total_lines);

  SamplePool pool;
  pool.num_vars = nv;
  pool.locus = Locus::Real;
  pool.seed = seed;
  pool.lines_used = total_lines;
  std::vector<double> line_contrib;
  for (auto& r : results) {
    for (auto& p : r.points) {
      p.weight = w;
      pool.points.push_back(std::move(p));
    }
    for (double h : r.line_hits) line_contrib.push_back(w * h);
    pool.rejected += r.rejected;
    pool.residual_max = std::max(pool.residual_max, r.residual_max);
  }
  pool.total_measure = std::accumulate(line_contrib.begin(), line_contrib.end(), 0.0);
  if (line_contrib.size() > 1) {
    double mean = pool.total_measure / line_contrib.size();
    double var = 0.0;
    for (double x : line_contrib) var += (x - mean) * (x - mean);
    var /= (line_contrib.size() - 1);
    pool.measure_se = std::sqrt(var * line_contrib.size());
  }
  return pool;
}

int connected_components(const SamplePool& pool, double link_factor) {
  const std::size_t n = pool.points.size();
  if (n == 0) return 0;
  std::vector<double> nn(n, 1e9);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double dist = fs_distance(pool.points[i].pt, pool.points[j].pt);
      nn[i] = std::min(nn[i], dist);
      nn[j] = std::min(nn[j], dist);
    }
  std::vector<double> sorted_nn = nn;
  std::nth_element(sorted_nn.begin(), sorted_nn.begin() + n / 2, sorted_nn.end());
  // the largest within-component gap of a uniform sample scales like the
  // typical gap times log(n), so calibrate the linking radius to that
  double radius = link_factor * sorted_nn[n / 2] * std::log(static_cast<double>(n) + 1.0);

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (fs_distance(pool.points[i].pt, pool.points[j].pt) <= radius)
        parent[find(i)] = find(j);
  int comps = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (find(i) == i) ++comps;
  return comps;
}

void save_pool_csv(const std::string& path, const SamplePool& pool) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write pool file: " + path);
  nlohmann::json header;
  header["num_vars"] = pool.num_vars;
  header["locus"] = pool.locus == Locus::Complex ? "complex" : "real";
  header["seed"] = pool.seed;
  header["count"] = pool.points.size();
  header["total_measure"] = pool.total_measure;
  header["measure_se"] = pool.measure_se;
  header["residual_max"] = pool.residual_max;
  header["lines_used"] = pool.lines_used;
  header["rejected"] = pool.rejected;
  out << "# " << header.dump() << "\n";
  for (int j = 0; j < pool.num_vars; ++j) out << "re" << j << ",im" << j << ",";
  out << "weight,chart\n";
  char buf[64];
  for (const auto& p : pool.points) {
    for (int j = 0; j < pool.num_vars; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,", p.pt.z[j].real(), p.pt.z[j].imag());
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g,%d\n", p.weight, p.pt.chart);
    out << buf;
  }
}

SamplePool load_pool_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open pool file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.size() < 2 || line[0] != '#')
    throw ValidationError("pool file missing JSON header: " + path);
  nlohmann::json header = nlohmann::json::parse(line.substr(1));
  SamplePool pool;
  pool.num_vars = header.at("num_vars").get<int>();
  pool.locus = header.at("locus").get<std::string>() == "real" ? Locus::Real : Locus::Complex;
  pool.seed = header.at("seed").get<std::uint64_t>();
  pool.total_measure = header.at("total_measure").get<double>();
  pool.measure_se = header.at("measure_se").get<double>();
  pool.residual_max = header.at("residual_max").get<double>();
  pool.lines_used = header.at("lines_used").get<std::size_t>();
  pool.rejected = header.at("rejected").get<std::size_t>();
  std::getline(in, line);  // column header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    Eigen::VectorXcd z(pool.num_vars);
    char comma;
    for (int j = 0; j < pool.num_vars; ++j) {
      double re, im;
      ls >> re >> comma >> im >> comma;
      z[j] = Complex(re, im);
    }
    PoolPoint p;
    int chart;
    ls >> p.weight >> comma >> chart;
    if (!ls) throw ValidationError("pool file row parse error: " + path);
    p.pt.z = std::move(z);
    p.pt.chart = chart;
    pool.points.push_back(std::move(p));
  }
  return pool;
}

}  // namespace berglab
