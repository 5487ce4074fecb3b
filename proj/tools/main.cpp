// Command line front end: pattern generation, scan simulation,
// reconstruction, sampling-rate sweeps, method comparison, and image
// scoring. Every flag can also come from an INI-style config file
// (--config), with command-line values taking precedence.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "pbgi/forward_model.hpp"
#include "pbgi/harness.hpp"
#include "pbgi/metrics.hpp"
#include "pbgi/pattern.hpp"
#include "pbgi/scene.hpp"
#include "pbgi/solver.hpp"
#include "pbgi/version.hpp"

namespace {

namespace fs = std::filesystem;

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

struct SceneOptions {
  std::string scene;
  std::string builtin;
  int n = 64;
  int q = 64;
  int bit_depth = 8;

  void attach(CLI::App* cmd, bool required) {
    auto* scene_opt = cmd->add_option("--scene", scene, "Ground-truth graymap file");
    auto* builtin_opt =
        cmd->add_option("--builtin", builtin,
                        "Builtin scene: letters, blocks, gradient, repeated-stripes");
    scene_opt->excludes(builtin_opt);
    if (required) {
      // one of the two must arrive; checked in resolve()
    }
    cmd->add_option("--n", n, "Across-track resolution (builtin scenes)")
        ->capture_default_str();
    cmd->add_option("--q", q, "Strip count (builtin scenes)")->capture_default_str();
    cmd->add_option("--bit-depth", bit_depth, "Quantization depth for image files")
        ->capture_default_str();
  }

  bool provided() const { return !scene.empty() || !builtin.empty(); }

  pbgi::Scene resolve() const {
    if (!scene.empty()) {
      return pbgi::load_scene(scene, bit_depth);
    }
    if (!builtin.empty()) {
      return pbgi::builtin_scene(builtin, n, q, bit_depth);
    }
    throw pbgi::DomainError("need --scene or --builtin");
  }
};

struct SolveOptions {
  std::string lambda = "auto";
  int max_iters = 2000;
  double tol = 1e-6;
  double eps = 1e-8;
  bool no_clip = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--lambda", lambda, "Regularization weight, or 'auto' for data-scaled")
        ->capture_default_str();
    cmd->add_option("--max-iters", max_iters, "Iteration cap")->capture_default_str();
    cmd->add_option("--tol", tol, "Relative-change stopping threshold")->capture_default_str();
    cmd->add_option("--eps", eps, "TV smoothing constant")->capture_default_str();
    cmd->add_flag("--no-clip", no_clip, "Skip the final [0,1] clipping");
  }

  pbgi::SolverConfig config() const {
    pbgi::SolverConfig c;
    if (lambda != "auto") {
      try {
        c.lambda = std::stod(lambda);
      } catch (const std::exception&) {
        throw pbgi::DomainError("--lambda must be a number or 'auto', got \"" + lambda + "\"");
      }
    }
    c.max_iters = max_iters;
    c.rel_tol = tol;
    c.tv_epsilon = eps;
    c.nonneg_clip = !no_clip;
    return c;
  }
};

struct EmissionOptions {
  double eta = 0.0;
  int m = 0;
  std::string mode = "2";
  std::uint64_t seed = 1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--eta", eta, "Sampling rate m/n in (0, 1]");
    cmd->add_option("--m", m, "Detector rows (alternative to --eta)");
    cmd->add_option("--mode", mode, "Emission mode: 1 (invariant) or 2 (per-strip)")
        ->capture_default_str();
    cmd->add_option("--seed", seed, "Pattern seed")->capture_default_str();
  }

  int rows(int n) const {
    if (m > 0 && eta > 0.0) throw pbgi::DomainError("give --eta or --m, not both");
    if (m > 0) return m;
    if (eta > 0.0) return pbgi::rows_for_eta(eta, n);
    throw pbgi::DomainError("need --eta or --m");
  }

  pbgi::PatternMode pattern_mode() const {
    if (mode == "1") return pbgi::PatternMode::Invariant;
    if (mode == "2") return pbgi::PatternMode::PerStrip;
    throw pbgi::DomainError("--mode must be 1 or 2 here, got \"" + mode + "\"");
  }
};

pbgi::ScanGeometry geometry_for(int m, int n, int q) {
  pbgi::ScanGeometry g;
  g.m = m;
  g.n = n;
  g.q = q;
  return g;
}

void print_quality(const pbgi::QualityReport& report) {
  std::cout << "mse=" << fmt("%.10g", report.mse) << " psnr_db="
            << (report.psnr_infinite ? "inf" : fmt("%.6f", report.psnr_db)) << "\n";
}

int run_generate_patterns(const SceneOptions& scene_opts, const EmissionOptions& emission,
                          const std::string& out) {
  const int rows = emission.rows(scene_opts.n);
  const auto seq = pbgi::generate_sequence(rows, scene_opts.n, scene_opts.q,
                                           emission.pattern_mode(), emission.seed);
  pbgi::save_pattern_sequence(seq, out);
  std::cout << "wrote " << out << " (" << seq.length() << " patterns, " << rows << "x"
            << scene_opts.n << ")\n";
  return 0;
}

int run_simulate(const SceneOptions& scene_opts, const EmissionOptions& emission,
                 double noise_sigma, std::uint64_t noise_seed, const std::string& out) {
  const auto scene = scene_opts.resolve();
  const int rows = emission.rows(scene.n());
  const auto seq =
      pbgi::generate_sequence(rows, scene.n(), scene.q(), emission.pattern_mode(), emission.seed);

  pbgi::NoiseSpec noise;
  if (noise_sigma > 0.0) {
    noise.kind = pbgi::NoiseSpec::Kind::AdditiveGaussian;
    noise.sigma = noise_sigma;
    noise.seed = noise_seed;
  }

  const auto record =
      pbgi::simulate_scan(scene, seq, geometry_for(rows, scene.n(), scene.q()), noise);

  fs::create_directories(out);
  pbgi::save_pattern_sequence(seq, fs::path(out) / "patterns.bin");
  pbgi::save_scan_record(record, fs::path(out) / "record.bin");
  pbgi::save_scene(scene, fs::path(out) / "scene.pgm");
  std::cout << "wrote " << out << "/patterns.bin, record.bin, scene.pgm (" << record.steps()
            << " steps)\n";
  return 0;
}

int run_reconstruct(const std::string& record_file, const std::string& patterns_file,
                    const SceneOptions& scene_opts, const SolveOptions& solve_opts,
                    const std::string& out) {
  const auto record = pbgi::load_scan_record(record_file);
  const auto seq = pbgi::load_pattern_sequence(patterns_file, record.meta.mode);
  const auto system = pbgi::assemble_system(record, seq);
  const auto result = pbgi::solve(system, solve_opts.config());

  fs::create_directories(out);
  const pbgi::Scene estimate(result.estimate.cwiseMax(0.0).cwiseMin(1.0), scene_opts.bit_depth);
  pbgi::save_scene(estimate, fs::path(out) / "recon.pgm");
  pbgi::write_trace_csv(result, fs::path(out) / "trace.csv");

  std::cout << "mode=" << pbgi::mode_name(system.mode()) << " iters=" << result.iterations
            << " converged=" << (result.converged ? 1 : 0)
            << " objective=" << fmt("%.10g", result.objective_trace.back()) << "\n";
  if (scene_opts.provided()) {
    print_quality(pbgi::psnr(scene_opts.resolve(), estimate));
  }
  std::cout << "wrote " << out << "/recon.pgm and trace.csv\n";
  return 0;
}

int run_sweep_cmd(const SceneOptions& scene_opts, std::vector<double> etas,
                  const std::string& mode, std::vector<std::uint64_t> seeds,
                  const SolveOptions& solve_opts, double noise_sigma, std::uint64_t noise_seed,
                  const std::string& out) {
  pbgi::ExperimentConfig config;
  config.scene_path = scene_opts.scene;
  config.builtin = scene_opts.builtin;
  config.n = scene_opts.n;
  config.q = scene_opts.q;
  config.bit_depth = scene_opts.bit_depth;
  config.etas = etas.empty() ? std::vector<double>{0.25, 0.5, 0.625, 0.75, 0.875, 1.0} : etas;
  if (mode == "1") {
    config.modes = {pbgi::PatternMode::Invariant};
  } else if (mode == "2") {
    config.modes = {pbgi::PatternMode::PerStrip};
  } else if (mode == "both") {
    config.modes = {pbgi::PatternMode::Invariant, pbgi::PatternMode::PerStrip};
  } else {
    throw pbgi::DomainError("--mode must be 1, 2, or both, got \"" + mode + "\"");
  }
  config.seeds = seeds.empty() ? std::vector<std::uint64_t>{1} : std::move(seeds);
  if (noise_sigma > 0.0) {
    config.noise.kind = pbgi::NoiseSpec::Kind::AdditiveGaussian;
    config.noise.sigma = noise_sigma;
    config.noise.seed = noise_seed;
  }
  config.solver = solve_opts.config();
  config.out_dir = out;

  const auto manifest = pbgi::run_sweep(config);
  int failures = 0;
  for (const auto& r : manifest.records) {
    std::cout << "mode=" << pbgi::mode_name(r.mode) << " eta=" << fmt("%.4g", r.eta)
              << " seed=" << r.seed << " ";
    if (r.ok) {
      std::cout << "psnr_db=" << (r.psnr_infinite ? "inf" : fmt("%.4f", r.psnr_db))
                << " iters=" << r.iterations << "\n";
    } else {
      ++failures;
      std::cout << "ERROR: " << r.error << "\n";
    }
  }
  std::cout << "manifest: " << (config.out_dir / "manifest.txt").string() << "\n";
  if (failures > 0) {
    std::cerr << failures << " of " << manifest.records.size() << " runs failed\n";
    return 1;
  }
  return 0;
}

int run_compare(const std::string& manifest_file, const std::string& out) {
  const auto manifest = pbgi::read_manifest(manifest_file);
  const auto cmp = pbgi::compare_methods(manifest);

  std::cout << "eta,mean_psnr_mode1,mean_psnr_mode2,difference\n";
  std::string csv = "eta,mean_psnr_mode1,mean_psnr_mode2,difference\n";
  for (const auto& row : cmp.rows) {
    const std::string line = fmt("%.17g", row.eta) + "," + fmt("%.6f", row.mean_psnr_mode1) +
                             "," + fmt("%.6f", row.mean_psnr_mode2) + "," +
                             fmt("%.6f", row.difference);
    std::cout << line << "\n";
    csv += line + "\n";
  }
  std::cout << "mode2_higher=" << cmp.mode2_higher << " mode1_higher=" << cmp.mode1_higher
            << " ties=" << cmp.ties << "\n";
  std::cout << "mean_wall_s mode1=" << fmt("%.3f", cmp.mean_wall_mode1)
            << " mode2=" << fmt("%.3f", cmp.mean_wall_mode2) << " (informational)\n";

  // presentation-only quadratic fits per mode when enough points exist
  if (cmp.rows.size() >= 3) {
    std::vector<std::pair<double, double>> pts1, pts2;
    bool finite = true;
    for (const auto& row : cmp.rows) {
      finite = finite && std::isfinite(row.mean_psnr_mode1) && std::isfinite(row.mean_psnr_mode2);
      pts1.emplace_back(row.eta, row.mean_psnr_mode1);
      pts2.emplace_back(row.eta, row.mean_psnr_mode2);
    }
    if (finite) {
      const auto fit1 = pbgi::fit_psnr_curve(pts1, 2);
      const auto fit2 = pbgi::fit_psnr_curve(pts2, 2);
      std::cout << "fit_mode1=" << fmt("%.6g", fit1.coefficients[0]) << ","
                << fmt("%.6g", fit1.coefficients[1]) << "," << fmt("%.6g", fit1.coefficients[2])
                << "\n";
      std::cout << "fit_mode2=" << fmt("%.6g", fit2.coefficients[0]) << ","
                << fmt("%.6g", fit2.coefficients[1]) << "," << fmt("%.6g", fit2.coefficients[2])
                << "\n";
    }
  }

  if (!out.empty()) {
    std::ofstream file(out);
    if (!file) throw pbgi::IoError("cannot open " + out + " for writing");
    file << csv;
  }
  return 0;
}

int run_metrics(const std::string& scene_file, const std::string& estimate_file, int bit_depth) {
  const auto reference = pbgi::load_scene(scene_file, bit_depth);
  const auto estimate = pbgi::load_scene(estimate_file, bit_depth);
  print_quality(pbgi::psnr(reference, estimate));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Push-broom ghost-imaging simulator and TV reconstruction toolkit"};
  app.set_version_flag("--version", std::string(pbgi::kVersion));
  app.set_config("--config", "", "INI config file mirroring the flags");
  app.require_subcommand(1);

  // generate-patterns
  auto* gen = app.add_subcommand("generate-patterns", "Write a seeded pattern sequence");
  SceneOptions gen_scene;
  EmissionOptions gen_emission;
  std::string gen_out;
  gen_scene.attach(gen, false);
  gen_emission.attach(gen);
  gen->add_option("--out", gen_out, "Output pattern file")->required();

  // simulate
  auto* sim = app.add_subcommand("simulate", "Simulate a push-broom scan");
  SceneOptions sim_scene;
  EmissionOptions sim_emission;
  double sim_noise_sigma = 0.0;
  std::uint64_t sim_noise_seed = 0;
  std::string sim_out;
  sim_scene.attach(sim, true);
  sim_emission.attach(sim);
  sim->add_option("--noise-sigma", sim_noise_sigma, "Additive Gaussian noise level")
      ->capture_default_str();
  sim->add_option("--noise-seed", sim_noise_seed, "Noise seed")->capture_default_str();
  sim->add_option("--out", sim_out, "Output directory")->required();

  // reconstruct
  auto* rec = app.add_subcommand("reconstruct", "Reconstruct a scene from a scan record");
  SceneOptions rec_scene;
  SolveOptions rec_solve;
  std::string rec_record, rec_patterns, rec_out;
  rec->add_option("--record", rec_record, "Scan record file")->required();
  rec->add_option("--patterns", rec_patterns, "Pattern sequence file")->required();
  rec_scene.attach(rec, false);
  rec_solve.attach(rec);
  rec->add_option("--out", rec_out, "Output directory")->required();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run a sampling-rate sweep");
  SceneOptions sweep_scene;
  SolveOptions sweep_solve;
  std::vector<double> sweep_etas;
  std::string sweep_mode = "both";
  std::vector<std::uint64_t> sweep_seeds;
  double sweep_noise_sigma = 0.0;
  std::uint64_t sweep_noise_seed = 0;
  std::string sweep_out;
  sweep_scene.attach(sweep, true);
  sweep->add_option("--eta", sweep_etas,
                    "Sampling rate, repeatable (default 0.25 0.5 0.625 0.75 0.875 1)");
  sweep->add_option("--mode", sweep_mode, "1, 2, or both")->capture_default_str();
  sweep->add_option("--seed", sweep_seeds, "Pattern seed, repeatable (default 1)");
  sweep_solve.attach(sweep);
  sweep->add_option("--noise-sigma", sweep_noise_sigma, "Additive Gaussian noise level")
      ->capture_default_str();
  sweep->add_option("--noise-seed", sweep_noise_seed, "Noise seed")->capture_default_str();
  sweep->add_option("--out", sweep_out, "Output directory")->required();

  // compare
  auto* cmp = app.add_subcommand("compare", "Compare modes in a sweep manifest");
  std::string cmp_manifest, cmp_out;
  cmp->add_option("--manifest", cmp_manifest, "manifest.txt from a sweep")->required();
  cmp->add_option("--out", cmp_out, "Optional CSV output for the comparison table");

  // metrics
  auto* met = app.add_subcommand("metrics", "Score an estimate against a reference image");
  std::string met_scene, met_estimate;
  int met_bit_depth = 8;
  met->add_option("--scene", met_scene, "Reference graymap")->required();
  met->add_option("--estimate", met_estimate, "Estimate graymap")->required();
  met->add_option("--bit-depth", met_bit_depth, "Quantization depth")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      return run_generate_patterns(gen_scene, gen_emission, gen_out);
    }
    if (sim->parsed()) {
      return run_simulate(sim_scene, sim_emission, sim_noise_sigma, sim_noise_seed, sim_out);
    }
    if (rec->parsed()) {
      return run_reconstruct(rec_record, rec_patterns, rec_scene, rec_solve, rec_out);
    }
    if (sweep->parsed()) {
      return run_sweep_cmd(sweep_scene, sweep_etas, sweep_mode, sweep_seeds, sweep_solve,
                           sweep_noise_sigma, sweep_noise_seed, sweep_out);
    }
    if (cmp->parsed()) {
      return run_compare(cmp_manifest, cmp_out);
    }
    if (met->parsed()) {
      return run_metrics(met_scene, met_estimate, met_bit_depth);
    }
  } catch (const pbgi::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
