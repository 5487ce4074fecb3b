#pragma once

// Experiment runner: end-to-end pipelines (patterns -> scan -> system ->
// reconstruction -> score) over sampling-rate sweeps, with a reproducible
// plain-text manifest and a CSV summary.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pbgi/errors.hpp"
#include "pbgi/forward_model.hpp"
#include "pbgi/scene.hpp"
#include "pbgi/solver.hpp"

namespace pbgi {

struct ExperimentConfig {
  std::string scene_path;  // graymap on disk; takes n, q from the file
  std::string builtin;     // or a builtin scene name; exactly one of the two
  int n = 64;
  int q = 64;
  int bit_depth = 8;
  std::vector<double> etas;              // each becomes m = round(eta * n), half up
  std::vector<PatternMode> modes;        // one or both modes
  std::vector<std::uint64_t> seeds;      // pattern seeds, one sweep point each
  NoiseSpec noise;
  SolverConfig solver;
  std::filesystem::path out_dir;

  void validate() const;
};

struct RunRecord {
  PatternMode mode = PatternMode::PerStrip;
  double eta = 1.0;
  int m = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  double psnr_db = 0.0;
  bool psnr_infinite = false;
  double mse = 0.0;
  int iterations = 0;
  bool converged = false;
  double wall_s = 0.0;
  std::string image;  // reconstruction file, relative to the manifest
  std::string error;  // set when not ok
};

struct RunManifest {
  std::string version;
  std::vector<std::pair<std::string, std::string>> config_echo;  // ordered key/value
  std::vector<RunRecord> records;  // sorted by (mode, eta, seed)

  bool all_ok() const;
};

// Number of detector rows for a sampling rate: round half up, never below 1.
int rows_for_eta(double eta, int n);

// Runs every (mode, eta, seed) combination, writes reconstructed graymaps,
// manifest.txt, and summary.csv into out_dir, and returns the manifest.
// A failing run is recorded and the sweep continues.
RunManifest run_sweep(const ExperimentConfig& config);

void write_manifest(const RunManifest& manifest, const std::filesystem::path& dir);
RunManifest read_manifest(const std::filesystem::path& manifest_file);

// Manifest bytes with the wall-clock fields stripped; equal configs must
// produce equal strings.
std::string manifest_text_without_walltime(const std::filesystem::path& manifest_file);

struct MethodComparison {
  struct Row {
    double eta = 0.0;
    double mean_psnr_mode1 = 0.0;
    double mean_psnr_mode2 = 0.0;
    double difference = 0.0;  // mode2 - mode1
  };
  std::vector<Row> rows;  // ascending eta
  int mode2_higher = 0;
  int mode1_higher = 0;
  int ties = 0;
  // informational only; reconstruction time is hardware-bound
  double mean_wall_mode1 = 0.0;
  double mean_wall_mode2 = 0.0;
};

// Per-eta mean PSNR of each mode over the shared seeds. Every (eta, seed)
// pair must have a successful record for both modes.
MethodComparison compare_methods(const RunManifest& manifest);

// Procedural stand-in targets: "letters", "blocks", "gradient",
// "repeated-stripes" (the last contains identical strips on purpose).
Scene builtin_scene(const std::string& name, int n, int q, int bit_depth = 8);

}  // namespace pbgi
