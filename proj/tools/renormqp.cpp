// Command-line front end: fixed points, mode-block spectra, cascade data,
// boundary slopes, dynamics cross-checks, and parameter-plane scans.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "qpr/analytic.hpp"
#include "qpr/config.hpp"
#include "qpr/dynamics.hpp"
#include "qpr/errors.hpp"
#include "qpr/families.hpp"
#include "qpr/io.hpp"
#include "qpr/parallel.hpp"
#include "qpr/qprenorm.hpp"
#include "qpr/renorm1d.hpp"
#include "qpr/version.hpp"

namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config_path;
  std::string outdir = ".";
  int jobs = 0;
  std::string argv_line;
};

qpr::RenormConfig load_config(const Common& c) {
  if (c.config_path.empty()) {
    qpr::RenormConfig cfg;
    cfg.validate();
    return cfg;
  }
  return qpr::config_from_json(qpr::load_json(c.config_path));
}

std::string out_path(const Common& c, const std::string& name) {
  fs::create_directories(c.outdir);
  return (fs::path(c.outdir) / name).string();
}

void emit_manifest(const Common& c, const std::string& sub, const qpr::RenormConfig& cfg,
                   std::vector<std::string> inputs, std::vector<std::string> outputs) {
  qpr::RunManifest m;
  m.tool = qpr::kToolkitName;
  m.version = qpr::kToolkitVersion;
  m.command = c.argv_line;
  m.config = qpr::config_to_json(cfg);
  m.inputs = std::move(inputs);
  m.outputs = std::move(outputs);
  qpr::write_manifest(out_path(c, sub + "_manifest.json"), m);
}

qpr::Forcing parse_forcing(const std::string& s) {
  if (s == "multiplicative" || s == "mult") return qpr::Forcing::multiplicative;
  if (s == "additive" || s == "add") return qpr::Forcing::additive;
  throw qpr::ConfigError("forcing must be multiplicative or additive");
}

// ---------------------------------------------------------------------------

int run_fixed_point(const Common& c, int n_x_override) {
  qpr::RenormConfig cfg = load_config(c);
  if (n_x_override > 0) cfg.n_x = n_x_override;
  cfg.validate();

  const qpr::DiscDomain dom{0.0, cfg.disc.radius};
  const qpr::AnalyticMap1D init(dom, {1.0, 0.0, -1.4});
  const qpr::FixedPointResult res = qpr::solve_fixed_point(init, cfg);

  qpr::FixedPointArtifact art;
  art.phi = res.phi;
  art.a = res.a;
  art.residual = res.residual;
  art.n_x = cfg.n_x;
  art.delta = cfg.delta;
  const std::string path = out_path(c, "fixed_point.json");
  qpr::json j = art;
  qpr::save_json(path, j);
  emit_manifest(c, "fixed_point", cfg, {}, {path});

  std::cout << "fixed point: a = " << qpr::csv_num(res.a)
            << "  residual = " << qpr::csv_num(res.residual)
            << "  newton iterations = " << res.iterations << "\n"
            << "wrote " << path << "\n";
  return 0;
}

int run_spectrum(const Common& c, const std::string& fp_path, bool one_dim, int omega_grid,
                 double omega_single, bool omega_set, int mode_k, int top_j,
                 int n_x_override) {
  const qpr::FixedPointArtifact art = qpr::load_fixed_point(fp_path);
  qpr::RenormConfig cfg = load_config(c);
  cfg.n_x = n_x_override > 0 ? n_x_override : art.n_x;
  cfg.delta = art.delta;
  cfg.validate();

  if (one_dim) {
    const auto ev = qpr::dr_spectrum(art.phi, cfg);
    const std::string path = out_path(c, "spectrum_1d.csv");
    qpr::CsvWriter csv(path, {"index", "re", "im"});
    for (std::size_t i = 0; i < ev.size(); ++i)
      csv.row({static_cast<double>(i), ev[i].real(), ev[i].imag()});
    emit_manifest(c, "spectrum", cfg, {fp_path}, {path});
    std::cout << "leading eigenvalues:";
    for (std::size_t i = 0; i < ev.size() && i < 4; ++i)
      std::cout << " " << qpr::csv_num(ev[i].real()) << (ev[i].imag() != 0.0 ? "+i*..." : "");
    std::cout << "\nwrote " << path << "\n";
    return 0;
  }

  std::vector<double> omegas;
  if (omega_set) {
    omegas.push_back(omega_single);
  } else {
    const int m = omega_grid > 0 ? omega_grid : 64;
    for (int i = 0; i < m; ++i) omegas.push_back(static_cast<double>(i) / m);
  }

  const qpr::FourierBlocks fb = qpr::l_blocks(art.phi, cfg);
  std::vector<std::vector<qpr::cplx>> rows(omegas.size());
  const int jobs = c.jobs > 0 ? c.jobs : qpr::default_jobs();
  qpr::parallel_for(static_cast<int>(omegas.size()), jobs, [&](int i) {
    rows[static_cast<std::size_t>(i)] = qpr::sorted_eigenvalues(
        qpr::l_omega_block(fb, qpr::two_pi * mode_k * omegas[static_cast<std::size_t>(i)]));
  });
  qpr::order_continuously(rows);

  const std::string path = out_path(c, "spectrum.csv");
  std::vector<std::string> header{"omega"};
  for (int j2 = 0; j2 < top_j; ++j2) {
    header.push_back("re_" + std::to_string(j2));
    header.push_back("im_" + std::to_string(j2));
  }
  qpr::CsvWriter csv(path, header);
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    std::vector<double> vals{omegas[i]};
    for (int j2 = 0; j2 < top_j; ++j2) {
      const qpr::cplx z = j2 < static_cast<int>(rows[i].size())
                              ? rows[i][static_cast<std::size_t>(j2)]
                              : qpr::cplx(0.0);
      vals.push_back(z.real());
      vals.push_back(z.imag());
    }
    std::vector<std::string> cells;
    cells.reserve(vals.size());
    for (double v : vals) cells.push_back(qpr::csv_num(v));
    csv.row_mixed(cells);
  }
  emit_manifest(c, "spectrum", cfg, {fp_path}, {path});
  std::cout << "wrote " << path << " (" << omegas.size() << " rotation numbers, mode " << mode_k
            << ")\n";
  return 0;
}

int run_superstable(const Common& c, int n_max) {
  qpr::RenormConfig cfg = load_config(c);
  const auto s = qpr::superstable_sequence(n_max);
  const std::string path = out_path(c, "superstable.csv");
  qpr::CsvWriter csv(path, {"n", "alpha", "ratio"});
  for (int n = 0; n <= n_max; ++n) {
    double ratio = 0.0;
    if (n >= 2)
      ratio = (s[static_cast<std::size_t>(n - 1)] - s[static_cast<std::size_t>(n - 2)]) /
              (s[static_cast<std::size_t>(n)] - s[static_cast<std::size_t>(n - 1)]);
    csv.row({static_cast<double>(n), s[static_cast<std::size_t>(n)], ratio});
  }
  emit_manifest(c, "superstable", cfg, {}, {path});
  std::cout << "alpha_" << n_max << " = " << qpr::csv_num(s.back()) << "\nwrote " << path << "\n";
  return 0;
}

int run_slopes(const Common& c, const std::string& fp_path, int n_max, double omega0,
               bool omega_set, const std::string& forcing_s, bool unforced) {
  // the fixed-point artifact anchors delta and the disc; fail early without it
  const qpr::FixedPointArtifact art = qpr::load_fixed_point(fp_path);
  qpr::RenormConfig cfg = load_config(c);
  cfg.delta = art.delta;
  cfg.validate();
  const double omega = omega_set ? omega0 : cfg.omega;
  const qpr::Forcing forcing = parse_forcing(forcing_s);

  const std::string path = out_path(c, "slopes.csv");
  qpr::CsvWriter csv(path, {"n", "alpha", "omega_n", "slope_plus", "slope_minus", "theta_plus",
                            "theta_minus", "den", "num_min", "num_max", "degenerate"});
  for (int n = 1; n <= n_max; ++n) {
    qpr::RenormSequence seq = qpr::renorm_sequences(n, omega, forcing, cfg);
    if (unforced)
      for (auto& mp : seq.v) {
        mp.u.coeffs.assign(1, 0.0);
        mp.v.coeffs.assign(1, 0.0);
      }
    const qpr::SlopeResult s = qpr::slopes_at_stage(seq, cfg);
    csv.row({static_cast<double>(n), s.alpha, s.omega_end, s.slope_plus, s.slope_minus,
             s.theta_plus, s.theta_minus, s.den, s.num_min, s.num_max,
             s.degenerate ? 1.0 : 0.0});
    std::cout << "n=" << n << "  alpha=" << qpr::csv_num(s.alpha)
              << "  slope_plus=" << qpr::csv_num(s.slope_plus)
              << "  slope_minus=" << qpr::csv_num(s.slope_minus) << "\n";
  }
  emit_manifest(c, "slopes", cfg, {fp_path}, {path});
  std::cout << "wrote " << path << "\n";
  return 0;
}

int run_verify(const Common& c, int n, double tol, const std::string& forcing_s) {
  qpr::RenormConfig cfg = load_config(c);
  const qpr::Forcing forcing = parse_forcing(forcing_s);
  const double omega = cfg.omega;
  const std::vector<double> ladder{1e-3, 5e-4, 2.5e-4};

  const qpr::SlopeResult formula = qpr::boundary_slopes(n, omega, forcing, cfg);
  bool ok = true;
  double worst = 0.0;
  for (const qpr::Branch br : {qpr::Branch::plus, qpr::Branch::minus}) {
    const qpr::BoundaryTrace tr = qpr::trace_boundary(n, omega, forcing, br, ladder, cfg);
    const double predicted =
        br == qpr::Branch::plus ? formula.slope_plus : formula.slope_minus;
    const double measured = tr.slope_extrapolated;
    const double rel = std::abs(measured - predicted) /
                       std::max(1e-12, std::abs(predicted));
    worst = std::max(worst, rel);
    ok = ok && rel <= tol;
    std::cout << (br == qpr::Branch::plus ? "plus " : "minus") << " branch: formula slope = "
              << qpr::csv_num(predicted) << "  dynamics slope = " << qpr::csv_num(measured)
              << "  rel err = " << qpr::csv_num(rel) << "  endpoint gap = "
              << qpr::csv_num(std::abs(tr.alpha_extrapolated - tr.alpha_star)) << "\n";
  }
  emit_manifest(c, "verify", cfg, {}, {});
  if (!ok)
    throw qpr::VerificationFailed("slope mismatch above tolerance (worst rel err = " +
                                  std::to_string(worst) + ")");
  std::cout << "verification passed (tol " << tol << ")\n";
  return 0;
}

int run_scan(const Common& c, int n, double a_min, double a_max, int a_steps, double e_min,
             double e_max, int e_steps, double omega_in, bool omega_set,
             const std::string& forcing_s) {
  qpr::RenormConfig cfg = load_config(c);
  const qpr::Forcing forcing = parse_forcing(forcing_s);
  const double omega = omega_set ? omega_in : cfg.omega;
  if (a_steps < 1 || e_steps < 1) throw qpr::ConfigError("scan needs at least one step per axis");

  std::vector<qpr::ReducibilityScanPoint> pts(
      static_cast<std::size_t>(a_steps) * static_cast<std::size_t>(e_steps));
  const int jobs = c.jobs > 0 ? c.jobs : qpr::default_jobs();
  qpr::parallel_for(static_cast<int>(pts.size()), jobs, [&](int idx) {
    const int ia = idx % a_steps, ie = idx / a_steps;
    const double alpha =
        a_steps == 1 ? a_min : a_min + (a_max - a_min) * ia / (a_steps - 1);
    const double eps = e_steps == 1 ? e_min : e_min + (e_max - e_min) * ie / (e_steps - 1);
    pts[static_cast<std::size_t>(idx)] =
        qpr::classify_point(qpr::SkewParams{alpha, eps, omega, forcing}, n, cfg);
  });

  const auto cls_name = [](qpr::PointClass cl) -> std::string {
    switch (cl) {
      case qpr::PointClass::reducible: return "reducible";
      case qpr::PointClass::nonreducible: return "nonreducible";
      case qpr::PointClass::nonattracting: return "nonattracting";
      case qpr::PointClass::lower_period: return "lower_period";
      default: return "no_curve";
    }
  };
  const std::string path = out_path(c, "scan.csv");
  qpr::CsvWriter csv(path,
                     {"alpha", "eps", "class", "indicator_min", "indicator_max", "lyapunov"});
  for (const auto& p : pts)
    csv.row_mixed({qpr::csv_num(p.alpha), qpr::csv_num(p.eps), cls_name(p.cls),
                   qpr::csv_num(p.indicator_min), qpr::csv_num(p.indicator_max),
                   qpr::csv_num(p.lyapunov)});
  emit_manifest(c, "scan", cfg, {}, {path});
  std::cout << "wrote " << path << " (" << pts.size() << " points)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"doubling renormalization of quasi-periodically forced unimodal maps"};
  app.set_version_flag("--version", std::string(qpr::kToolkitName) + " " + qpr::kToolkitVersion);

  Common common;
  for (int i = 1; i < argc; ++i) {
    if (i > 1) common.argv_line += " ";
    common.argv_line += argv[i];
  }
  bool print_default = false;
  app.add_flag("--print-default-config", print_default, "print the default config as JSON");
  app.add_option("--config", common.config_path, "JSON config (absent keys keep defaults)");
  app.add_option("--outdir", common.outdir, "output directory")->capture_default_str();
  app.add_option("--jobs", common.jobs, "worker threads (default: RENORM_QP_JOBS or hardware)");

  auto* fp = app.add_subcommand("fixed-point", "solve the doubling fixed point");
  int fp_nx = 0;
  fp->add_option("--n-x", fp_nx, "override the x-degree");

  auto* sp = app.add_subcommand("spectrum", "spectra of the linearized operator");
  std::string sp_fp = "fixed_point.json";
  bool sp_one_dim = false;
  int sp_grid = 0, sp_mode = 1, sp_top = 12, sp_nx = 0;
  double sp_omega = 0.0;
  sp->add_option("--fixed-point", sp_fp, "fixed-point artifact")->capture_default_str();
  sp->add_flag("--one-dim", sp_one_dim, "spectrum of the unforced derivative instead");
  sp->add_option("--omega-grid", sp_grid, "number of rotation numbers to sweep (default 64)");
  auto* sp_omega_opt = sp->add_option("--omega", sp_omega, "single rotation number");
  sp->add_option("--mode", sp_mode, "Fourier mode of the block")->capture_default_str();
  sp->add_option("--top", sp_top, "eigenvalues per row")->capture_default_str();
  sp->add_option("--n-x", sp_nx, "override the x-degree");

  auto* ss = app.add_subcommand("superstable", "superstable cascade parameters");
  int ss_nmax = 7;
  ss->add_option("--n-max", ss_nmax, "largest cycle order 2^n")->capture_default_str();

  auto* sl = app.add_subcommand("slopes", "first-order reducibility-loss boundary slopes");
  std::string sl_fp = "fixed_point.json", sl_forcing = "multiplicative";
  int sl_nmax = 3;
  double sl_omega = 0.0;
  bool sl_unforced = false;
  sl->add_option("--fixed-point", sl_fp, "fixed-point artifact")->capture_default_str();
  sl->add_option("--n-max", sl_nmax, "largest cascade stage")->capture_default_str();
  auto* sl_omega_opt = sl->add_option("--omega", sl_omega, "drive rotation number");
  sl->add_option("--forcing", sl_forcing, "multiplicative|additive")->capture_default_str();
  sl->add_flag("--unforced", sl_unforced, "zero the forcing direction (degenerate slopes)");

  auto* vf = app.add_subcommand("verify", "compare formula slopes against direct dynamics");
  int vf_n = 1;
  double vf_tol = 0.05;
  std::string vf_forcing = "multiplicative";
  vf->add_option("--n", vf_n, "cascade stage")->capture_default_str();
  vf->add_option("--tol", vf_tol, "relative tolerance")->capture_default_str();
  vf->add_option("--forcing", vf_forcing, "multiplicative|additive")->capture_default_str();

  auto* sc = app.add_subcommand("scan", "classify points of the (alpha, eps) plane");
  int sc_n = 1, sc_asteps = 11, sc_esteps = 5;
  double sc_amin = 3.1, sc_amax = 3.4, sc_emin = 0.0, sc_emax = 2e-3, sc_omega = 0.0;
  std::string sc_forcing = "multiplicative";
  sc->add_option("--n", sc_n, "cascade stage (period 2^n curves)")->capture_default_str();
  sc->add_option("--alpha-min", sc_amin, "")->capture_default_str();
  sc->add_option("--alpha-max", sc_amax, "")->capture_default_str();
  sc->add_option("--alpha-steps", sc_asteps, "")->capture_default_str();
  sc->add_option("--eps-min", sc_emin, "")->capture_default_str();
  sc->add_option("--eps-max", sc_emax, "")->capture_default_str();
  sc->add_option("--eps-steps", sc_esteps, "")->capture_default_str();
  auto* sc_omega_opt = sc->add_option("--omega", sc_omega, "drive rotation number");
  sc->add_option("--forcing", sc_forcing, "multiplicative|additive")->capture_default_str();

  app.require_subcommand(0, 1);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 4;
  }

  try {
    if (print_default) {
      qpr::RenormConfig cfg;
      std::cout << qpr::config_to_json(cfg).dump(2) << "\n";
      return 0;
    }
    if (*fp) return run_fixed_point(common, fp_nx);
    if (*sp)
      return run_spectrum(common, sp_fp, sp_one_dim, sp_grid, sp_omega,
                          sp_omega_opt->count() > 0, sp_mode, sp_top, sp_nx);
    if (*ss) return run_superstable(common, ss_nmax);
    if (*sl)
      return run_slopes(common, sl_fp, sl_nmax, sl_omega, sl_omega_opt->count() > 0, sl_forcing,
                        sl_unforced);
    if (*vf) return run_verify(common, vf_n, vf_tol, vf_forcing);
    if (*sc)
      return run_scan(common, sc_n, sc_amin, sc_amax, sc_asteps, sc_emin, sc_emax, sc_esteps,
                      sc_omega, sc_omega_opt->count() > 0, sc_forcing);
    std::cout << app.help();
    return 0;
  } catch (const qpr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qpr::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
}
