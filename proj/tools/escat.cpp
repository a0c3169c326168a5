// Command-line driver: forward solves, synthetic data generation, phased and
// phaseless reconstructions, and a self-check suite.
//
// Exit codes: 0 success, 1 validation/solver failure, 2 config error,
// 3 nonconvergence.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "escat/escat.hpp"

namespace fs = std::filesystem;
using namespace escat;

namespace {

struct ForwardModel {
  FarField phased;
  PhaselessData phaseless;
};

// Forward model at resolution n: single obstacle, or obstacle plus the
// reference ball when the config carries one.
ForwardModel compute_far_field(const RunConfig& cfg, int n) {
  const auto shape = cfg.make_shape();
  ForwardModel out;
  if (cfg.solver.reference_ball) {
    const TwoDomainSolution sol =
        solve_two_domain(*shape, *cfg.solver.reference_ball, cfg.medium, cfg.wave, n);
    out.phased = far_field(sol, cfg.medium, cfg.solver.n_bar);
  } else {
    const BoundaryDensities sol = solve_single(*shape, cfg.medium, cfg.wave, n);
    out.phased = far_field(sol, cfg.medium, cfg.solver.n_bar);
  }
  out.phaseless = phaseless_data(out.phased);
  return out;
}

DataFileHeader make_header(const RunConfig& cfg, bool noisy) {
  DataFileHeader h;
  h.lambda = cfg.medium.lambda;
  h.mu = cfg.medium.mu;
  h.omega = cfg.medium.omega;
  h.wave_kind = cfg.wave.kind == WaveKind::P ? "P" : "S";
  h.theta = cfg.wave.theta;
  h.n_bar = cfg.solver.n_bar;
  h.delta = noisy ? cfg.solver.delta : 0.0;
  h.seed = cfg.solver.rng_seed;
  return h;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& fn) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  fn(out);
  std::cout << "wrote " << path.string() << "\n";
}

int run_forward(const RunConfig& cfg, const std::string& out_arg, bool phaseless,
                bool noise, int n) {
  ForwardModel model = compute_far_field(cfg, n);
  if (noise && cfg.solver.delta > 0.0) {
    model.phased = inject_noise(model.phased, cfg.solver.delta, cfg.solver.rng_seed);
    model.phaseless =
        inject_noise_phaseless(model.phaseless, cfg.solver.delta, cfg.solver.rng_seed);
  }
  const DataFileHeader h = make_header(cfg, noise);
  fs::path base = out_arg.empty() ? fs::path(cfg.output_dir) / "farfield.dat"
                                  : fs::path(out_arg);
  DataFileHeader hp = h;
  hp.phaseless = false;
  write_file(base, [&](std::ostream& o) { write_far_field(o, hp, model.phased); });
  if (phaseless) {
    fs::path pl = base.parent_path() / (base.stem().string() + "_phaseless" +
                                        base.extension().string());
    DataFileHeader hq = h;
    hq.phaseless = true;
    write_file(pl, [&](std::ostream& o) { write_phaseless(o, hq, model.phaseless); });
  }
  return 0;
}

void check_header(const DataFileHeader& h, const RunConfig& cfg) {
  const auto near = [](double a, double b) { return std::abs(a - b) <= 1e-12; };
  const std::string kind = cfg.wave.kind == WaveKind::P ? "P" : "S";
  if (!near(h.lambda, cfg.medium.lambda) || !near(h.mu, cfg.medium.mu) ||
      !near(h.omega, cfg.medium.omega) || h.wave_kind != kind ||
      !near(h.theta, cfg.wave.theta))
    throw ConfigError("data file header does not match the config (medium or wave)");
}

int run_invert(const RunConfig& cfg, const std::string& data_path, bool phaseless) {
  std::ifstream in(data_path);
  if (!in) throw ConfigError("cannot open data file: " + data_path);
  const LoadedData data = read_data_file(in);
  check_header(data.header, cfg);
  if (!cfg.initial) throw ConfigError("config: 'initial' is required for inversion");
  if (phaseless && !cfg.solver.reference_ball)
    throw ConfigError(
        "phaseless inversion requires a reference ball: without it the squared "
        "moduli of the far field are invariant under translations of the obstacle "
        "and the location cannot be recovered");

  std::unique_ptr<ParametricCurve> exact;
  if (cfg.shape_name || cfg.shape_curve) exact = cfg.make_shape();

  IterationTrace trace;
  if (phaseless) {
    if (!data.phaseless)
      throw ConfigError("data file is phased but invert-phaseless was requested");
    trace = run_algorithm_II(cfg.solver, cfg.medium, cfg.wave, *data.phaseless,
                             *cfg.initial, exact.get());
  } else {
    if (!data.phased)
      throw ConfigError("data file is phaseless but invert-phased was requested");
    trace = run_algorithm_I(cfg.solver, cfg.medium, cfg.wave, *data.phased,
                            *cfg.initial, exact.get());
  }

  const fs::path dir(cfg.output_dir);
  write_file(dir / "trace.csv", [&](std::ostream& o) { write_trace_csv(o, trace); });
  write_file(dir / "initial.csv",
             [&](std::ostream& o) { write_polyline_csv(o, *cfg.initial); });
  const StarCurve& final_curve = trace.records.back().curve;
  write_file(dir / "reconstructed.csv",
             [&](std::ostream& o) { write_polyline_csv(o, final_curve); });
  if (exact)
    write_file(dir / "exact.csv", [&](std::ostream& o) { write_polyline_csv(o, *exact); });
  write_file(dir / "final_curve.json", [&](std::ostream& o) {
    o << io_detail::curve_json(final_curve).dump(2) << "\n";
  });

  const auto& last = trace.records.back();
  std::cout << "iterations: " << trace.records.size() - 1 << "\n"
            << "final E: " << last.E << "\n";
  if (last.Err >= 0.0) std::cout << "final Err: " << last.Err << "\n";
  if (!trace.converged) {
    std::cerr << "did not reach E < epsilon within max_iters\n";
    return 3;
  }
  return 0;
}

struct CheckReport {
  bool ok = true;
  void check(const std::string& name, double measured, double bound) {
    const bool pass = measured <= bound;
    ok = ok && pass;
    std::cout << (pass ? "pass" : "FAIL") << "  " << name << ": " << measured
              << " (bound " << bound << ")\n";
  }
};

int run_validate() {
  CheckReport rep;
  const ElasticMedium medium(3.88, 2.56, 0.7 * pi);

  // Forward solver against the analytic disk series, both incidence kinds.
  for (const WaveKind kind : {WaveKind::P, WaveKind::S}) {
    const IncidentWave wave(kind, 0.0);
    const CircleBoundary disk(Vec2::Zero(), 1.0);
    const BoundaryDensities sol = solve_single(disk, medium, wave, 64);
    const FarField ff = far_field(sol, medium, 32);
    const ModalSolution modal = disk_modal_solve(1.0, medium, wave);
    const FarField ref = disk_far_field(modal, medium, ff.directions);
    double worst = 0.0, scale = 0.0;
    for (int i = 0; i < ff.directions.size(); ++i) {
      worst = std::max({worst, std::abs(ff.phi_inf[i] - ref.phi_inf[i]),
                        std::abs(ff.psi_inf[i] - ref.psi_inf[i])});
      scale = std::max({scale, std::abs(ref.phi_inf[i]), std::abs(ref.psi_inf[i])});
    }
    rep.check(std::string("disk oracle deviation, ") +
                  (kind == WaveKind::P ? "P" : "S") + " incidence",
              worst / scale, 1e-8);
    rep.check("disk oracle boundary residual",
              disk_boundary_residual(modal, medium, wave), 1e-12);
  }

  // Quadrature identities.
  {
    double worst = 0.0;
    for (const int n : {16, 32, 64}) {
      const auto& qw = QuadratureWeights::get(n);
      worst = std::max(worst, std::abs(qw.R.sum()));
      for (int m = 1; m < n; ++m) {
        double s = 0.0;
        for (int j = 0; j < 2 * n; ++j) s += qw.R[j] * std::cos(m * pi * j / n);
        worst = std::max(worst, std::abs(s + 2.0 * pi / m));
      }
      for (int k = 0; k < 2 * n; ++k)
        worst = std::max(worst, std::abs(qw.T[qw.mod2n(-k)] + qw.T[k]));
    }
    rep.check("quadrature identities", worst, 1e-11);
  }

  // Operator derivative of the far-field map versus central differences.
  {
    const StarCurve curve = StarCurve::circle(Vec2(0.1, -0.2), 0.8, 6);
    const IncidentWave wave(WaveKind::S, 0.3);
    const int n = 32;
    const BoundaryDensities sol = solve_single(curve, medium, wave, n);
    ShapeUpdate q = ShapeUpdate::zero(6);
    q.dc = Vec2(0.31, -0.14);
    q.dalpha << 0.2, -0.11, 0.07, 0.05, -0.02, 0.01, 0.03;
    q.dbeta << 0.09, -0.04, 0.06, -0.03, 0.02, -0.01;
    Eigen::VectorXd dirs(8);
    for (int i = 0; i < 8; ++i) dirs[i] = 2.0 * pi * i / 8;
    const Eigen::VectorXcd der =
        frechet_far_field(curve, sol.phi1, medium.kappa_p, q, dirs);
    const double h = 1e-5;
    auto smap = [&](double step) {
      const StarCurve moved = apply_update(curve, q, step);
      Eigen::VectorXcd v(dirs.size());
      const Complex pref = gamma_factor(medium.kappa_p) * pi / static_cast<double>(n);
      for (int i = 0; i < dirs.size(); ++i) {
        const Vec2 xhat(std::cos(dirs[i]), std::sin(dirs[i]));
        Complex acc = 0.0;
        for (int j = 0; j < 2 * n; ++j)
          acc += std::exp(-iu * medium.kappa_p * xhat.dot(moved.point(pi * j / n))) *
                 sol.phi1[j];
        v[i] = pref * acc;
      }
      return v;
    };
    const Eigen::VectorXcd fd = (smap(h) - smap(-h)) / (2.0 * h);
    rep.check("far-field derivative vs finite differences",
              (der - fd).norm() / der.norm(), 1e-5);
  }

  // Translation relations of the far field under an obstacle shift.
  {
    const Vec2 h(0.3, 0.2);
    const IncidentWave wave(WaveKind::P, 0.4);
    const AppleShape apple, shifted(h);
    const FarField f0 = far_field(solve_single(apple, medium, wave, 48), medium, 32);
    const FarField fh = far_field(solve_single(shifted, medium, wave, 48), medium, 32);
    double worst = 0.0;
    for (int i = 0; i < f0.directions.size(); ++i) {
      const double t = f0.directions[i];
      const Vec2 xhat(std::cos(t), std::sin(t));
      const Complex pp =
          std::exp(iu * medium.kappa_p * (wave.d - xhat).dot(h));
      const Complex ps = std::exp(
          iu * (medium.kappa_p * wave.d - medium.kappa_s * xhat).dot(h));
      worst = std::max({worst, std::abs(fh.phi_inf[i] - pp * f0.phi_inf[i]),
                        std::abs(fh.psi_inf[i] - ps * f0.psi_inf[i]),
                        std::abs(std::abs(fh.phi_inf[i]) - std::abs(f0.phi_inf[i])),
                        std::abs(std::abs(fh.psi_inf[i]) - std::abs(f0.psi_inf[i]))});
    }
    rep.check("translation relations (phased and moduli)", worst, 1e-8);
  }

  std::cout << (rep.ok ? "all checks passed" : "validation FAILED") << "\n";
  return rep.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D elastic obstacle scattering: forward solver and shape reconstruction"};
  app.require_subcommand(1);

  std::string config_path, out_path, data_path;
  bool phaseless_flag = false, noise_flag = false;

  auto* fwd = app.add_subcommand("forward", "solve the scattering problem, write far-field data");
  fwd->add_option("--config", config_path, "JSON config")->required();
  fwd->add_option("--out", out_path, "output data file");
  fwd->add_flag("--phaseless", phaseless_flag, "also write squared-modulus data");
  fwd->add_flag("--noise", noise_flag, "apply the configured noise level");

  auto* mkd = app.add_subcommand(
      "make-data", "generate inversion-ready synthetic data on a refined grid");
  mkd->add_option("--config", config_path, "JSON config")->required();
  mkd->add_option("--out", out_path, "output data file");
  mkd->add_flag("--phaseless", phaseless_flag, "also write squared-modulus data");

  auto* inv1 = app.add_subcommand("invert-phased", "reconstruct from phased far-field data");
  inv1->add_option("--config", config_path, "JSON config")->required();
  inv1->add_option("--data", data_path, "far-field data file")->required();

  auto* inv2 = app.add_subcommand("invert-phaseless",
                                  "reconstruct from phaseless data with a reference ball");
  inv2->add_option("--config", config_path, "JSON config")->required();
  inv2->add_option("--data", data_path, "phaseless data file")->required();

  auto* val = app.add_subcommand("validate", "run the built-in numerical self-checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*val) return run_validate();
    const RunConfig cfg = load_config(config_path);
    if (*fwd) return run_forward(cfg, out_path, phaseless_flag, noise_flag, cfg.solver.n);
    if (*mkd) {
      // Data is produced at twice the inversion resolution so the inversion
      // never sees its own discretization, and noise is always applied.
      if (out_path.empty())
        out_path = (fs::path(cfg.output_dir) / "data.dat").string();
      return run_forward(cfg, out_path, phaseless_flag, true, 2 * cfg.solver.n);
    }
    if (*inv1) return run_invert(cfg, data_path, false);
    if (*inv2) return run_invert(cfg, data_path, true);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    // a step that cannot be made feasible is a failure to converge, not a
    // data or configuration problem
    if (std::string(e.what()).rfind("rejected-step", 0) == 0) return 3;
    return 1;
  }
  return 2;
}
