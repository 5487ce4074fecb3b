#include "pbgi/harness.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "pbgi/geometry.hpp"
#include "pbgi/metrics.hpp"
#include "pbgi/rng.hpp"
#include "pbgi/version.hpp"

namespace pbgi {

void ExperimentConfig::validate() const {
  if (scene_path.empty() == builtin.empty()) {
    throw DomainError("exactly one of scene_path and builtin must be set");
  }
  if (etas.empty()) throw DomainError("need at least one sampling rate");
  for (double eta : etas) {
    if (!(eta > 0.0) || eta > 1.0) {
      throw DomainError("sampling rate must be in (0, 1], got " + std::to_string(eta));
    }
  }
  if (modes.empty()) throw DomainError("need at least one mode");
  if (seeds.empty()) throw DomainError("need at least one seed");
  if (out_dir.empty()) throw DomainError("output directory must be set");
  solver.validate();
}

bool RunManifest::all_ok() const {
  return std::all_of(records.begin(), records.end(), [](const RunRecord& r) { return r.ok; });
}

int rows_for_eta(double eta, int n) {
  const int m = static_cast<int>(std::floor(eta * n + 0.5));
  return std::max(1, m);
}

namespace {

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string join_doubles(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += format("%.17g", values[i]);
  }
  return out;
}

std::string psnr_field(const RunRecord& r) {
  return r.psnr_infinite ? "inf" : format("%.10g", r.psnr_db);
}

Scene resolve_scene(const ExperimentConfig& config) {
  if (!config.scene_path.empty()) {
    return load_scene(config.scene_path, config.bit_depth);
  }
  return builtin_scene(config.builtin, config.n, config.q, config.bit_depth);
}

std::uint64_t run_noise_seed(const NoiseSpec& noise, PatternMode mode, int m, std::uint64_t seed) {
  std::uint64_t s = rng::substream(noise.seed, static_cast<std::uint64_t>(mode));
  s = rng::substream(s, static_cast<std::uint64_t>(m));
  return rng::substream(s, seed);
}

std::string image_name(PatternMode mode, double eta, std::uint64_t seed) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "recon_mode%s_eta%.4f_seed%llu.pgm", mode_name(mode), eta,
                static_cast<unsigned long long>(seed));
  return buf;
}

}  // namespace

RunManifest run_sweep(const ExperimentConfig& config) {
  config.validate();
  const Scene scene = resolve_scene(config);
  const int n = scene.n();
  const int q = scene.q();

  std::filesystem::create_directories(config.out_dir);
  save_scene(scene, config.out_dir / "scene.pgm");

  RunManifest manifest;
  manifest.version = std::string("pbgi ") + std::string(kVersion);
  auto& echo = manifest.config_echo;
  echo.emplace_back("scene", config.scene_path.empty() ? "builtin:" + config.builtin
                                                       : config.scene_path);
  echo.emplace_back("n", std::to_string(n));
  echo.emplace_back("q", std::to_string(q));
  echo.emplace_back("bit_depth", std::to_string(scene.bit_depth));
  {
    std::string etas = join_doubles(config.etas);
    echo.emplace_back("etas", etas);
    std::string modes;
    for (std::size_t i = 0; i < config.modes.size(); ++i) {
      if (i) modes += ",";
      modes += mode_name(config.modes[i]);
    }
    echo.emplace_back("modes", modes);
    std::string seeds;
    for (std::size_t i = 0; i < config.seeds.size(); ++i) {
      if (i) seeds += ",";
      seeds += std::to_string(config.seeds[i]);
    }
    echo.emplace_back("seeds", seeds);
  }
  echo.emplace_back("noise", config.noise.active()
                                 ? "gaussian sigma=" + format("%.17g", config.noise.sigma) +
                                       " seed=" + std::to_string(config.noise.seed)
                                 : "none");
  echo.emplace_back("lambda", config.solver.lambda ? format("%.17g", *config.solver.lambda)
                                                   : std::string("auto"));
  echo.emplace_back("max_iters", std::to_string(config.solver.max_iters));
  echo.emplace_back("rel_tol", format("%.17g", config.solver.rel_tol));
  echo.emplace_back("tv_epsilon", format("%.17g", config.solver.tv_epsilon));
  echo.emplace_back("nonneg_clip", config.solver.nonneg_clip ? "1" : "0");

  // Deterministic run order: mode, then eta, then seed.
  std::vector<PatternMode> modes = config.modes;
  std::sort(modes.begin(), modes.end());
  modes.erase(std::unique(modes.begin(), modes.end()), modes.end());
  std::vector<double> etas = config.etas;
  std::sort(etas.begin(), etas.end());
  etas.erase(std::unique(etas.begin(), etas.end()), etas.end());
  std::vector<std::uint64_t> seeds = config.seeds;
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

  for (PatternMode mode : modes) {
    for (double eta : etas) {
      for (std::uint64_t seed : seeds) {
        RunRecord record;
        record.mode = mode;
        record.eta = eta;
        record.seed = seed;
        record.m = rows_for_eta(eta, n);
        const auto start = std::chrono::steady_clock::now();
        try {
          const int m = record.m;
          const PatternSequence seq = generate_sequence(m, n, q, mode, seed);
          ScanGeometry geometry;
          geometry.m = m;
          geometry.n = n;
          geometry.q = q;
          NoiseSpec noise = config.noise;
          noise.seed = run_noise_seed(config.noise, mode, m, seed);
          const ScanRecord scan = simulate_scan(scene, seq, geometry, noise);
          const MeasurementSystem system = assemble_system(scan, seq);
          const ReconstructionResult result = solve(system, config.solver);

          // Score and store on the clipped estimate.
          Scene estimate(result.estimate.cwiseMax(0.0).cwiseMin(1.0), scene.bit_depth);
          const QualityReport report = psnr(scene, estimate);
          record.psnr_db = report.psnr_db;
          record.psnr_infinite = report.psnr_infinite;
          record.mse = report.mse;
          record.iterations = result.iterations;
          record.converged = result.converged;
          record.image = image_name(mode, eta, seed);
          save_scene(estimate, config.out_dir / record.image);
          record.ok = true;
        } catch (const std::exception& e) {
          record.ok = false;
          record.error = e.what();
        }
        record.wall_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        manifest.records.push_back(std::move(record));
      }
    }
  }

  write_manifest(manifest, config.out_dir);
  return manifest;
}

namespace {

std::string record_line(const RunRecord& r) {
  std::string line = "run mode=";
  line += mode_name(r.mode);
  line += " eta=" + format("%.17g", r.eta);
  line += " m=" + std::to_string(r.m);
  line += " seed=" + std::to_string(r.seed);
  if (r.ok) {
    line += " psnr_db=" + psnr_field(r);
    line += " mse=" + format("%.10g", r.mse);
    line += " iters=" + std::to_string(r.iterations);
    line += std::string(" converged=") + (r.converged ? "1" : "0");
    line += " wall_s=" + format("%.3f", r.wall_s);
    line += " image=" + r.image;
    line += " status=ok";
  } else {
    line += " wall_s=" + format("%.3f", r.wall_s);
    line += " status=error";
    std::string cleaned = r.error;
    std::replace(cleaned.begin(), cleaned.end(), '\n', ' ');
    line += " error=\"" + cleaned + "\"";
  }
  return line;
}

}  // namespace

void write_manifest(const RunManifest& manifest, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "manifest.txt");
  if (!out) {
    throw IoError("cannot open " + (dir / "manifest.txt").string() + " for writing");
  }
  out << "version=" << manifest.version << "\n";
  for (const auto& [key, value] : manifest.config_echo) {
    out << key << "=" << value << "\n";
  }
  for (const auto& record : manifest.records) {
    out << record_line(record) << "\n";
  }
  if (!out) {
    throw IoError("failed while writing manifest");
  }

  std::ofstream csv(dir / "summary.csv");
  if (!csv) {
    throw IoError("cannot open " + (dir / "summary.csv").string() + " for writing");
  }
  csv << "eta,mode,seed,psnr_db,mse,iters,converged,wall_s\n";
  for (const auto& r : manifest.records) {
    if (!r.ok) continue;
    csv << format("%.17g", r.eta) << "," << mode_name(r.mode) << "," << r.seed << ","
        << psnr_field(r) << "," << format("%.10g", r.mse) << "," << r.iterations << ","
        << (r.converged ? 1 : 0) << "," << format("%.3f", r.wall_s) << "\n";
  }
  if (!csv) {
    throw IoError("failed while writing summary.csv");
  }
}

namespace {

std::map<std::string, std::string> parse_fields(const std::string& line) {
  std::map<std::string, std::string> fields;
  std::size_t pos = 4;  // past "run "
  while (pos < line.size()) {
    while (pos < line.size() && line[pos] == ' ') ++pos;
    const std::size_t eq = line.find('=', pos);
    if (eq == std::string::npos) break;
    const std::string key = line.substr(pos, eq - pos);
    std::size_t end;
    std::string value;
    if (eq + 1 < line.size() && line[eq + 1] == '"') {
      end = line.find('"', eq + 2);
      if (end == std::string::npos) end = line.size();
      value = line.substr(eq + 2, end - eq - 2);
      ++end;
    } else {
      end = line.find(' ', eq + 1);
      if (end == std::string::npos) end = line.size();
      value = line.substr(eq + 1, end - eq - 1);
    }
    fields[key] = value;
    pos = end;
  }
  return fields;
}

}  // namespace

RunManifest read_manifest(const std::filesystem::path& manifest_file) {
  std::ifstream in(manifest_file);
  if (!in) {
    throw IoError("cannot open manifest " + manifest_file.string());
  }
  RunManifest manifest;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("run ", 0) == 0) {
      const auto fields = parse_fields(line);
      RunRecord r;
      try {
        r.mode = fields.at("mode") == "1" ? PatternMode::Invariant : PatternMode::PerStrip;
        r.eta = std::stod(fields.at("eta"));
        r.m = std::stoi(fields.at("m"));
        r.seed = std::stoull(fields.at("seed"));
        r.ok = fields.at("status") == "ok";
        if (r.ok) {
          const std::string& p = fields.at("psnr_db");
          r.psnr_infinite = p == "inf";
          r.psnr_db = r.psnr_infinite ? std::numeric_limits<double>::infinity() : std::stod(p);
          r.mse = std::stod(fields.at("mse"));
          r.iterations = std::stoi(fields.at("iters"));
          r.converged = fields.at("converged") == "1";
          r.image = fields.at("image");
        } else if (auto it = fields.find("error"); it != fields.end()) {
          r.error = it->second;
        }
        if (auto it = fields.find("wall_s"); it != fields.end()) {
          r.wall_s = std::stod(it->second);
        }
      } catch (const std::exception&) {
        throw IoError("malformed run record in " + manifest_file.string() + ": " + line);
      }
      manifest.records.push_back(std::move(r));
    } else {
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos) {
        throw IoError("malformed manifest line in " + manifest_file.string() + ": " + line);
      }
      const std::string key = line.substr(0, eq);
      const std::string value = line.substr(eq + 1);
      if (key == "version") {
        manifest.version = value;
      } else {
        manifest.config_echo.emplace_back(key, value);
      }
    }
  }
  return manifest;
}

std::string manifest_text_without_walltime(const std::filesystem::path& manifest_file) {
  std::ifstream in(manifest_file);
  if (!in) {
    throw IoError("cannot open manifest " + manifest_file.string());
  }
  std::string out;
  std::string line;
  while (std::getline(in, line)) {
    std::string filtered;
    std::istringstream tokens(line);
    std::string token;
    bool first = true;
    while (tokens >> token) {
      if (token.rfind("wall_s=", 0) == 0) continue;
      if (!first) filtered += " ";
      filtered += token;
      first = false;
    }
    out += filtered;
    out += "\n";
  }
  return out;
}

MethodComparison compare_methods(const RunManifest& manifest) {
  // (eta, seed) -> psnr per mode, successful runs only
  std::map<std::pair<double, std::uint64_t>, double> mode1, mode2;
  for (const auto& r : manifest.records) {
    if (!r.ok) continue;
    auto& bucket = r.mode == PatternMode::Invariant ? mode1 : mode2;
    bucket[{r.eta, r.seed}] = r.psnr_db;
  }

  std::vector<std::string> missing;
  for (const auto& [key, unused] : mode1) {
    if (!mode2.count(key)) {
      missing.push_back("(mode=2, eta=" + format("%.17g", key.first) +
                        ", seed=" + std::to_string(key.second) + ")");
    }
  }
  for (const auto& [key, unused] : mode2) {
    if (!mode1.count(key)) {
      missing.push_back("(mode=1, eta=" + format("%.17g", key.first) +
                        ", seed=" + std::to_string(key.second) + ")");
    }
  }
  if (mode1.empty() || mode2.empty()) {
    throw PairingError("comparison needs successful runs of both modes");
  }
  if (!missing.empty()) {
    std::string what = "missing paired runs:";
    for (const auto& t : missing) what += " " + t;
    throw PairingError(what);
  }

  std::map<double, std::pair<std::vector<double>, std::vector<double>>> by_eta;
  for (const auto& [key, value] : mode1) by_eta[key.first].first.push_back(value);
  for (const auto& [key, value] : mode2) by_eta[key.first].second.push_back(value);

  MethodComparison comparison;
  {
    double wall1 = 0.0, wall2 = 0.0;
    std::size_t count1 = 0, count2 = 0;
    for (const auto& r : manifest.records) {
      if (!r.ok) continue;
      if (r.mode == PatternMode::Invariant) {
        wall1 += r.wall_s;
        ++count1;
      } else {
        wall2 += r.wall_s;
        ++count2;
      }
    }
    comparison.mean_wall_mode1 = count1 ? wall1 / static_cast<double>(count1) : 0.0;
    comparison.mean_wall_mode2 = count2 ? wall2 / static_cast<double>(count2) : 0.0;
  }
  for (const auto& [eta, pair] : by_eta) {
    MethodComparison::Row row;
    row.eta = eta;
    const auto mean = [](const std::vector<double>& v) {
      double s = 0.0;
      for (double x : v) s += x;
      return s / static_cast<double>(v.size());
    };
    row.mean_psnr_mode1 = mean(pair.first);
    row.mean_psnr_mode2 = mean(pair.second);
    row.difference = row.mean_psnr_mode2 - row.mean_psnr_mode1;
    if (row.difference > 0.0) {
      ++comparison.mode2_higher;
    } else if (row.difference < 0.0) {
      ++comparison.mode1_higher;
    } else {
      ++comparison.ties;
    }
    comparison.rows.push_back(row);
  }
  return comparison;
}

namespace {

// 5x7 block letter masks, drawn along-track.
constexpr std::array<const char*, 7> kLetterG = {
    ".###.", "#...#", "#....", "#.###", "#...#", "#...#", ".###.",
};
constexpr std::array<const char*, 7> kLetterI = {
    "#####", "..#..", "..#..", "..#..", "..#..", "..#..", "#####",
};

Scene letters_scene(int n, int q, int bit_depth) {
  // 9x13 master bitmap: one-cell border around "G I".
  constexpr int kRows = 9;
  constexpr int kCols = 13;
  std::array<std::array<double, kCols>, kRows> master{};
  for (int r = 0; r < 7; ++r) {
    for (int c = 0; c < 5; ++c) {
      master[r + 1][c + 1] = kLetterG[r][c] == '#' ? 1.0 : 0.0;
      master[r + 1][c + 7] = kLetterI[r][c] == '#' ? 1.0 : 0.0;
    }
  }
  Eigen::MatrixXd data(n, q);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < q; ++j) {
      const int r = i * kRows / n;
      const int c = j * kCols / q;
      data(i, j) = master[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
  }
  return Scene(std::move(data), bit_depth);
}

Scene blocks_scene(int n, int q, int bit_depth) {
  Eigen::MatrixXd data = Eigen::MatrixXd::Constant(n, q, 0.1);
  const auto fill = [&](double r0, double r1, double c0, double c1, double level) {
    const int i0 = static_cast<int>(std::floor(r0 * n));
    const int i1 = static_cast<int>(std::floor(r1 * n));
    const int j0 = static_cast<int>(std::floor(c0 * q));
    const int j1 = static_cast<int>(std::floor(c1 * q));
    for (int i = i0; i < i1; ++i) {
      for (int j = j0; j < j1; ++j) {
        data(i, j) = level;
      }
    }
  };
  fill(0.10, 0.45, 0.10, 0.40, 0.90);
  fill(0.55, 0.90, 0.15, 0.50, 0.55);
  fill(0.20, 0.75, 0.60, 0.90, 0.35);
  return Scene(std::move(data), bit_depth);
}

Scene gradient_scene(int n, int q, int bit_depth) {
  Eigen::MatrixXd data(n, q);
  for (int j = 0; j < q; ++j) {
    data.col(j).setConstant(static_cast<double>(j + 1) / static_cast<double>(q + 1));
  }
  return Scene(std::move(data), bit_depth);
}

Scene repeated_stripes_scene(int n, int q, int bit_depth) {
  // A barcode of identical vertical strokes: stroke strips repeat with
  // period q/4, background strips fill the gaps. Many strips are exact
  // copies of each other, which is what makes an invariant illumination
  // pattern reproduce the same reconstruction error again and again.
  const int period = std::max(2, q / 4);
  const int stroke = std::max(1, period / 2);
  const int top = n / 5;
  const int bottom = n - n / 5;
  Eigen::MatrixXd data = Eigen::MatrixXd::Constant(n, q, 0.1);
  for (int j = 0; j < q; ++j) {
    if (j % period < stroke) {
      for (int i = top; i < bottom; ++i) {
        data(i, j) = 0.9;
      }
    }
  }
  return Scene(std::move(data), bit_depth);
}

}  // namespace

Scene builtin_scene(const std::string& name, int n, int q, int bit_depth) {
  if (n < 2 || q < 1) {
    throw DimensionError("builtin scene needs n >= 2 and q >= 1");
  }
  if (name == "letters") return letters_scene(n, q, bit_depth);
  if (name == "blocks") return blocks_scene(n, q, bit_depth);
  if (name == "gradient") return gradient_scene(n, q, bit_depth);
  if (name == "repeated-stripes") return repeated_stripes_scene(n, q, bit_depth);
  throw LookupError("unknown builtin scene \"" + name +
                    "\" (known: letters, blocks, gradient, repeated-stripes)");
}

}  // namespace pbgi
