// berglab: reproducible Bergman-calibration experiments on real projective
// hypersurfaces. Subcommands: sample, basis, bergman, assume-check,
// calibrate, homotopy, report. Exit codes: 0 pass, 2 numerical-acceptance
// failure, 3 validation error, 4 internal error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "berglab/calibration.hpp"
#include "berglab/config.hpp"
#include "berglab/errors.hpp"
#include "berglab/homotopy.hpp"
#include "berglab/parallel.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using namespace berglab;

struct RunContext {
  ExperimentConfig cfg;
  HomogeneousPolynomial F;
};

RunContext open_run(const std::string& config_path, std::uint64_t seed_override,
                    const std::string& out_override) {
  RunContext ctx;
  ctx.cfg = load_config(config_path);
  if (seed_override != 0) ctx.cfg.seed = seed_override;
  if (!out_override.empty()) ctx.cfg.out_dir = out_override;
  validate_config(ctx.cfg);
  ctx.F = load_polynomial(ctx.cfg.polynomial_path);
  fs::create_directories(ctx.cfg.out_dir);
  return ctx;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << j.dump(2) << "\n";
}

int cmd_sample(const RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  SamplePool cpool = sample_complex_locus(ctx.F, cfg.complex_count, cfg.seed);
  save_pool_csv(cfg.out_dir + "/complex_pool.csv", cpool);
  json man;
  man["complex"] = {{"count", cpool.points.size()},
                    {"total_measure", cpool.total_measure},
                    {"measure_se", cpool.measure_se},
                    {"residual_max", cpool.residual_max},
                    {"rejected", cpool.rejected},
                    {"seed", cpool.seed}};
  if (ctx.F.is_real(1e-14)) {
    SamplePool rpool = sample_real_locus(ctx.F, cfg.real_count, cfg.seed + 1);
    save_pool_csv(cfg.out_dir + "/real_pool.csv", rpool);
    man["real"] = {{"count", rpool.points.size()},
                   {"total_measure", rpool.total_measure},
                   {"measure_se", rpool.measure_se},
                   {"residual_max", rpool.residual_max},
                   {"components", connected_components(rpool)},
                   {"seed", rpool.seed}};
  }
  write_json(cfg.out_dir + "/sample.json", man);
  std::printf("sample: %zu complex points, measure %.6f +- %.2e\n", cpool.points.size(),
              cpool.total_measure, cpool.measure_se);
  return 0;
}

int cmd_basis(const RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  json man;
  for (int m = cfg.m_min; m <= cfg.m_max; ++m) {
    SectionBasis basis = section_space_basis(ctx.F, m);
    save_basis(cfg.out_dir + "/basis_m" + std::to_string(m) + ".txt", basis);
    man["m" + std::to_string(m)] = {{"dimension", basis.dimension()},
                                    {"expected", expected_section_dimension(ctx.F, m)}};
    std::printf("basis m=%d: dimension %d\n", m, basis.dimension());
  }
  write_json(cfg.out_dir + "/basis.json", man);
  return 0;
}

int cmd_bergman(const RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  SamplePool pool = sample_complex_locus(ctx.F, cfg.gram_count, cfg.seed);
  json man;
  for (int m = cfg.m_min; m <= cfg.m_max; ++m) {
    BergmanData bd = build_bergman(ctx.F, m, pool);
    std::string stem = "bergman_m" + std::to_string(m);
    save_bergman(cfg.out_dir, stem, bd);

    // diagnostics over a pool slice: rho_m, |phi_m|_{h_m}, K-curvature eig
    std::ofstream csv(cfg.out_dir + "/" + stem + "_diag.csv");
    csv << "rho_m,hm_norm_phi,min_curvature_eig\n";
    char buf[96];
    std::size_t stride = std::max<std::size_t>(1, pool.points.size() / 200);
    double hm_max = 0.0;
    for (std::size_t i = 0; i < pool.points.size(); i += stride) {
      const ProjectivePoint& pt = pool.points[i].pt;
      double rho = density_of_states(bd, pt);
      double hm = hm_norm_phi(bd, pt);
      hm_max = std::max(hm_max, hm);
      double eig = 0.0;
      try {
        eig = min_relative_eigenvalue(ctx.F, pt, bd.g, k_curvature_fd(ctx.F, pt, bd.g, 1e-3));
      } catch (const NumericalError&) {
        eig = std::nan("");
      }
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", rho, hm, eig);
      csv << buf;
    }
    man["m" + std::to_string(m)] = {{"dimension", bd.kappa.dimension()},
                                    {"gram_residual", bd.gram_residual},
                                    {"gram_se_max", bd.gram_se_max},
                                    {"hm_norm_phi_max", hm_max},
                                    {"phi_real", bd.phi.rep.is_real(1e-12)}};
    std::printf("bergman m=%d: dim %d, gram residual %.2e, max |phi|_{h_m} %.12f\n", m,
                bd.kappa.dimension(), bd.gram_residual, hm_max);
  }
  write_json(cfg.out_dir + "/bergman.json", man);
  return 0;
}

int cmd_assume_check(const RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  SamplePool pool = sample_complex_locus(ctx.F, std::min<std::size_t>(cfg.complex_count, 4000),
                                         cfg.seed);
  AssumptionReport rep = assumption_check({}, ctx.F, pool);
  json man;
  man["min_eigenvalue"] = rep.min_eigenvalue;
  man["max_eigenvalue"] = rep.max_eigenvalue;
  man["stencil_agreement"] = rep.stencil_agreement;
  man["samples"] = rep.samples;
  man["skipped"] = rep.skipped;
  man["positive"] = rep.positive();
  write_json(cfg.out_dir + "/assumption.json", man);
  std::printf("assumption check: min eigenvalue %.6f over %zu samples (%s)\n",
              rep.min_eigenvalue, rep.samples,
              rep.positive() ? "Kahler form positive" : "NOT positive");
  return 0;
}

int cmd_calibrate(const RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  const int n = ctx.F.num_vars() - 1;
  const int excess = ctx.F.degree() - n - 1;
  SamplePool cpool = sample_complex_locus(ctx.F, cfg.complex_count, cfg.seed);
  SamplePool rpool = sample_real_locus(ctx.F, cfg.real_count, cfg.seed + 1);

  json man;
  if (excess > 0 && excess % 2 == 0) {
    // section 2 demo: phi = (sum z^2)^k with 2k = d - n - 1
    FermatPhi phi = fermat_phi(excess / 2, n);
    CalibrationReport rep = max_profile(
        [&](const ProjectivePoint& pt) { return phi.norm(pt); }, cpool, rpool);
    rep.section_name = "fermat_k" + std::to_string(phi.k);
    CanonicalSection sec{1, phi.representative(ctx.F.num_vars())};
    LocalFrame dummy{};
    (void)dummy;
    rep.theta = theta_alignment(
        [&](const ProjectivePoint& pt) {
          LocalFrame fr = default_frame(ctx.F, pt);
          TangentFrame tf = tangent_frame(ctx.F, pt);
          Complex a = evaluate_section(sec, ctx.F, pt, fr);
          Complex om = frame_pairing(ctx.F, fr, pt.z, tf.vectors);
          return a * std::pow(om, sec.m);
        },
        rpool, &rep.theta_residual);
    save_calibration(cfg.out_dir, "calibrate_fermat", rep);
    man["fermat"] = {{"max_complex", rep.max_complex}, {"max_real", rep.max_real},
                     {"min_real", rep.min_real},       {"strict", rep.strict},
                     {"theta", rep.theta},             {"theta_residual", rep.theta_residual},
                     {"fit_slope", rep.margin_fit_slope}, {"fit_r2", rep.margin_fit_r2}};
    std::printf("calibrate fermat: real %.12f..%.12f, complex max %.12f, strict=%d\n",
                rep.min_real, rep.max_real, rep.max_complex, rep.strict);
  } else {
    man["fermat"] = "skipped (d - n - 1 not even)";
  }

  // section 3.1 report with the Bergman section phi_m at m = m_min
  SamplePool gram_pool = sample_complex_locus(ctx.F, cfg.gram_count, cfg.seed + 2);
  BergmanData bd = build_bergman(ctx.F, cfg.m_min, gram_pool);
  CalibrationReport rep = max_profile(
      [&](const ProjectivePoint& pt) { return hm_norm_phi(bd, pt); }, cpool, rpool);
  rep.section_name = "phi_m" + std::to_string(bd.m);
  rep.theta = theta_alignment(
      [&](const ProjectivePoint& pt) {
        LocalFrame fr = default_frame(ctx.F, pt);
        TangentFrame tf = tangent_frame(ctx.F, pt);
        Complex a = evaluate_section(bd.phi, ctx.F, pt, fr);
        Complex om = frame_pairing(ctx.F, fr, pt.z, tf.vectors);
        return a * std::pow(om, bd.phi.m);
      },
      rpool, &rep.theta_residual);
  save_calibration(cfg.out_dir, "calibrate_phi_m", rep);

  // comass over random frames at pool points
  double comass_max = 0.0;
  std::size_t stride = std::max<std::size_t>(1, cpool.points.size() / 100);
  std::size_t pts = 0;
  for (std::size_t i = 0; i < cpool.points.size() && pts < 100; i += stride, ++pts)
    comass_max = std::max(
        comass_max, comass_check(bd.phi, ctx.F, cpool.points[i].pt, 100, cfg.seed + 7 + i));
  man["phi_m"] = {{"m", bd.m},
                  {"max_complex", rep.max_complex},
                  {"max_real", rep.max_real},
                  {"min_real", rep.min_real},
                  {"theta", rep.theta},
                  {"theta_residual", rep.theta_residual},
                  {"comass_max", comass_max},
                  {"strict", rep.strict}};
  write_json(cfg.out_dir + "/calibrate.json", man);
  std::printf("calibrate phi_m (m=%d): real %.12f..%.12f, complex max %.12f, comass %.12f\n",
              bd.m, rep.min_real, rep.max_real, rep.max_complex, comass_max);
  return 0;
}

int cmd_homotopy(const RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  SamplePool gram_pool = sample_complex_locus(ctx.F, cfg.gram_count, cfg.seed);
  BergmanData bd = build_bergman(ctx.F, cfg.homotopy_m, gram_pool);
  Loop base = real_locus_loop(ctx.F, cfg.homotopy_vertices);

  json man;
  json runs = json::array();
  int passed = 0;
  for (int i = 0; i < cfg.homotopy_count; ++i) {
    double amp = cfg.homotopy_amplitude * static_cast<double>(i + 1) /
                 static_cast<double>(cfg.homotopy_count);
    std::uint64_t seed = cfg.seed + 100 + static_cast<std::uint64_t>(i);
    Homotopy h;
    int retries = 0;
    for (;;) {
      try {
        h = generate_homotopy(base, bd, cfg.homotopy_steps, amp, seed, cfg.guard_floor);
        break;
      } catch (const GuardViolation&) {
        if (++retries > 6) throw;
        amp *= 0.6;  // amplitude sweep capped by the divisor guard
      }
    }
    VolumeComparisonReport rep = verify_volume_comparison(h, bd);
    save_homotopy(cfg.out_dir, "homotopy_" + std::to_string(i), h, rep);
    if (rep.pass) ++passed;
    double worst_margin = 0.0, worst_cons = 0.0;
    for (const auto& r : rep.rows) {
      worst_margin = std::min(worst_margin, r.margin);
      worst_cons = std::max(worst_cons, r.conservation);
    }
    runs.push_back({{"seed", seed},
                    {"amplitude", amp},
                    {"retries", retries},
                    {"pass", rep.pass},
                    {"tolerance", rep.tolerance},
                    {"base_length", rep.base_length},
                    {"worst_margin", worst_margin},
                    {"worst_conservation", worst_cons}});
    std::printf("homotopy %2d: amp %.4f, margin >= %.3e, conservation <= %.3e, tol %.3e [%s]\n",
                i, amp, worst_margin, worst_cons, rep.tolerance, rep.pass ? "ok" : "FAIL");
  }
  man["runs"] = runs;
  man["passed"] = passed;
  man["total"] = cfg.homotopy_count;
  man["m"] = cfg.homotopy_m;
  man["vertices"] = cfg.homotopy_vertices;
  write_json(cfg.out_dir + "/homotopy.json", man);
  std::printf("homotopy verdict: %d/%d comparisons satisfied\n", passed, cfg.homotopy_count);
  return passed == cfg.homotopy_count ? 0 : 2;
}

int cmd_report(const RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  json agg;
  for (const char* name :
       {"sample", "basis", "bergman", "assumption", "calibrate", "homotopy"}) {
    fs::path p = fs::path(cfg.out_dir) / (std::string(name) + ".json");
    if (fs::exists(p)) {
      std::ifstream in(p);
      agg[name] = json::parse(in);
    }
  }
  write_json(cfg.out_dir + "/report.json", agg);
  std::ofstream csv(cfg.out_dir + "/report.csv");
  csv << "key,value\n";
  std::function<void(const std::string&, const json&)> flatten =
      [&](const std::string& prefix, const json& j) {
        if (j.is_object()) {
          for (auto it = j.begin(); it != j.end(); ++it)
            flatten(prefix.empty() ? it.key() : prefix + "." + it.key(), it.value());
        } else if (j.is_array()) {
          int idx = 0;
          for (const auto& v : j) flatten(prefix + "[" + std::to_string(idx++) + "]", v);
        } else {
          csv << prefix << "," << j.dump() << "\n";
        }
      };
  flatten("", agg);
  std::printf("report: aggregated %s/report.json\n", cfg.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bergman-metric calibration experiments on projective hypersurfaces"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::uint64_t seed_override = 0;
  unsigned threads = 0;
  app.add_option("--config", config_path, "experiment config file")->required();
  app.add_option("--seed", seed_override, "override [sampling] seed");
  app.add_option("--threads", threads, "cap worker threads (0 = hardware)");
  app.add_option("--out", out_override, "override output directory");

  std::string sub;
  for (const char* name : {"sample", "basis", "bergman", "assume-check", "calibrate",
                           "homotopy", "report"}) {
    auto* s = app.add_subcommand(name);
    s->callback([&sub, name] { sub = name; });
  }

  CLI11_PARSE(app, argc, argv);
  berglab::set_max_threads(threads);

  try {
    RunContext ctx = open_run(config_path, seed_override, out_override);
    if (sub == "sample") return cmd_sample(ctx);
    if (sub == "basis") return cmd_basis(ctx);
    if (sub == "bergman") return cmd_bergman(ctx);
    if (sub == "assume-check") return cmd_assume_check(ctx);
    if (sub == "calibrate") return cmd_calibrate(ctx);
    if (sub == "homotopy") return cmd_homotopy(ctx);
    if (sub == "report") return cmd_report(ctx);
    std::cerr << "unknown subcommand\n";
    return 4;
  } catch (const berglab::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
