#include "pbgi/forward_model.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <string>

#include "pbgi/rng.hpp"

namespace pbgi {

ScanRecord::ScanRecord(Eigen::MatrixXd f, ScanMeta meta_) : frames(std::move(f)), meta(meta_) {
  if (meta.m < 1 || meta.n < meta.m || meta.q < 1) {
    throw DimensionError("scan record metadata out of range: m=" + std::to_string(meta.m) +
                         " n=" + std::to_string(meta.n) + " q=" + std::to_string(meta.q));
  }
  if (frames.rows() != meta.m || frames.cols() != meta.q + meta.m - 1) {
    throw DimensionError("scan record must hold q+m-1 frames of m readouts, got " +
                         std::to_string(frames.rows()) + "x" + std::to_string(frames.cols()));
  }
  if (!frames.allFinite()) {
    throw DimensionError("scan record contains non-finite readouts");
  }
}

MeasurementSystem::MeasurementSystem(PatternMode mode, int n, int q,
                                     std::vector<Eigen::MatrixXd> blocks,
                                     Eigen::VectorXd stacked_signal)
    : mode_(mode), n_(n), q_(q), blocks_(std::move(blocks)), y_(std::move(stacked_signal)) {
  if (blocks_.empty()) throw DimensionError("measurement system needs at least one block");
  m_ = static_cast<int>(blocks_.front().rows());
  const std::size_t expected_blocks = mode_ == PatternMode::Invariant ? 1u : static_cast<std::size_t>(q_);
  if (blocks_.size() != expected_blocks) {
    throw DimensionError("expected " + std::to_string(expected_blocks) + " strip matrices, got " +
                         std::to_string(blocks_.size()));
  }
  for (const auto& b : blocks_) {
    if (b.rows() != m_ || b.cols() != n_) {
      throw DimensionError("strip matrix shape mismatch");
    }
  }
  if (y_.size() != static_cast<Eigen::Index>(m_) * q_) {
    throw DimensionError("stacked signal must have length m*q");
  }
}

const Eigen::MatrixXd& MeasurementSystem::strip_matrix(int i) const {
  if (i < 0 || i >= q_) {
    throw IndexError("strip index " + std::to_string(i) + " outside [0, " + std::to_string(q_) + ")");
  }
  return mode_ == PatternMode::Invariant ? blocks_.front() : blocks_[static_cast<std::size_t>(i)];
}

Eigen::Map<const Eigen::MatrixXd> MeasurementSystem::signal_matrix() const {
  return {y_.data(), m_, q_};
}

Eigen::VectorXd MeasurementSystem::apply(const Eigen::VectorXd& x) const {
  if (x.size() != static_cast<Eigen::Index>(n_) * q_) {
    throw DimensionError("stacked scene must have length n*q = " + std::to_string(n_ * q_) +
                         ", got " + std::to_string(x.size()));
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(m_) * q_);
  for (int i = 0; i < q_; ++i) {
    out.segment(static_cast<Eigen::Index>(i) * m_, m_).noalias() =
        strip_matrix(i) * x.segment(static_cast<Eigen::Index>(i) * n_, n_);
  }
  return out;
}

Eigen::VectorXd MeasurementSystem::adjoint(const Eigen::VectorXd& r) const {
  if (r.size() != static_cast<Eigen::Index>(m_) * q_) {
    throw DimensionError("stacked signal must have length m*q = " + std::to_string(m_ * q_) +
                         ", got " + std::to_string(r.size()));
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(n_) * q_);
  for (int i = 0; i < q_; ++i) {
    out.segment(static_cast<Eigen::Index>(i) * n_, n_).noalias() =
        strip_matrix(i).transpose() * r.segment(static_cast<Eigen::Index>(i) * m_, m_);
  }
  return out;
}

Eigen::MatrixXd MeasurementSystem::dense_matrix() const {
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m_) * q_,
                                                static_cast<Eigen::Index>(n_) * q_);
  for (int i = 0; i < q_; ++i) {
    dense.block(static_cast<Eigen::Index>(i) * m_, static_cast<Eigen::Index>(i) * n_, m_, n_) =
        strip_matrix(i);
  }
  return dense;
}

ScanRecord simulate_scan(const Scene& scene, const PatternSequence& seq,
                         const ScanGeometry& geometry, const NoiseSpec& noise) {
  geometry.validate();
  if (noise.sigma < 0.0 || !std::isfinite(noise.sigma)) {
    throw DomainError("noise sigma must be finite and >= 0");
  }
  const int m = seq.m();
  const int n = seq.n();
  const int q = scene.q();
  if (geometry.m != m || geometry.n != n) {
    throw DimensionError("geometry (m=" + std::to_string(geometry.m) + ", n=" +
                         std::to_string(geometry.n) + ") does not match patterns (m=" +
                         std::to_string(m) + ", n=" + std::to_string(n) + ")");
  }
  if (scene.n() != n) {
    throw DimensionError("scene has " + std::to_string(scene.n()) +
                         " across-track pixels, patterns expect " + std::to_string(n));
  }
  if (geometry.q != q) {
    throw DimensionError("geometry q=" + std::to_string(geometry.q) + " does not match scene q=" +
                         std::to_string(q));
  }
  if (seq.mode == PatternMode::PerStrip && seq.length() != q + m - 1) {
    throw DimensionError("per-strip scan of " + std::to_string(q) + " strips needs " +
                         std::to_string(q + m - 1) + " patterns, sequence has " +
                         std::to_string(seq.length()));
  }

  const int steps = q + m - 1;
  Eigen::MatrixXd frames = Eigen::MatrixXd::Zero(m, steps);
  for (int k = 0; k < steps; ++k) {
    const SpecklePattern& pattern = seq.at_step(k);
    for (int j = 0; j < m; ++j) {
      const int strip = k - j;
      if (strip >= 0 && strip < q) {
        frames(j, k) = pattern.data.row(j).dot(scene.data.col(strip));
      }
    }
    if (noise.active()) {
      rng::GaussianSampler sampler(rng::substream(noise.seed, static_cast<std::uint64_t>(k)));
      for (int j = 0; j < m; ++j) {
        frames(j, k) += noise.sigma * sampler.next();
      }
    }
  }

  ScanMeta meta;
  meta.m = m;
  meta.n = n;
  meta.q = q;
  meta.mode = seq.mode;
  meta.seed = seq.seed;
  meta.noise = noise;
  return ScanRecord(std::move(frames), meta);
}

Eigen::MatrixXd assemble_strip_matrix(const PatternSequence& seq, int strip_index) {
  if (seq.mode == PatternMode::Invariant) {
    if (strip_index < 0) {
      throw IndexError("strip index must be >= 0, got " + std::to_string(strip_index));
    }
    return seq.patterns.front().data;
  }
  const int strips = seq.strip_count();
  if (strip_index < 0 || strip_index >= strips) {
    throw IndexError("strip index " + std::to_string(strip_index) + " outside [0, " +
                     std::to_string(strips) + ")");
  }
  const int m = seq.m();
  Eigen::MatrixXd block(m, seq.n());
  for (int j = 0; j < m; ++j) {
    block.row(j) = seq.patterns[static_cast<std::size_t>(strip_index + j)].data.row(j);
  }
  return block;
}

MeasurementSystem assemble_system(const ScanRecord& record, const PatternSequence& seq) {
  const ScanMeta& meta = record.meta;
  if (seq.m() != meta.m || seq.n() != meta.n || seq.mode != meta.mode) {
    throw ConsistencyError("pattern sequence does not match scan record metadata");
  }
  if (seq.mode == PatternMode::PerStrip && seq.length() != meta.q + meta.m - 1) {
    throw ConsistencyError("pattern sequence length " + std::to_string(seq.length()) +
                           " does not cover " + std::to_string(meta.q) + " strips");
  }

  const int m = meta.m;
  const int q = meta.q;
  // Strip i is read by row j at step i + j.
  Eigen::VectorXd y(static_cast<Eigen::Index>(m) * q);
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j < m; ++j) {
      y(static_cast<Eigen::Index>(i) * m + j) = record.frames(j, i + j);
    }
  }

  std::vector<Eigen::MatrixXd> blocks;
  if (seq.mode == PatternMode::Invariant) {
    blocks.push_back(seq.patterns.front().data);
  } else {
    blocks.reserve(static_cast<std::size_t>(q));
    for (int i = 0; i < q; ++i) {
      blocks.push_back(assemble_strip_matrix(seq, i));
    }
  }
  return MeasurementSystem(seq.mode, meta.n, q, std::move(blocks), std::move(y));
}

namespace {

constexpr std::array<char, 8> kRecordMagic = {'G', 'I', 'S', 'C', 'S', 'C', 'N', '1'};

void put_u32le(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                         static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
  out.write(bytes, 4);
}

std::uint32_t get_u32le(std::istream& in, const std::filesystem::path& path) {
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  if (!in) throw IoError("truncated header in " + path.string());
  return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) | (static_cast<std::uint32_t>(bytes[3]) << 24);
}

void put_f64le(std::ostream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
  out.write(bytes, 8);
}

double get_f64le(std::istream& in, const std::filesystem::path& path) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (!in) throw IoError("truncated readout data in " + path.string());
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace

void save_scan_record(const ScanRecord& record, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  out.write(kRecordMagic.data(), kRecordMagic.size());
  put_u32le(out, static_cast<std::uint32_t>(record.meta.m));
  put_u32le(out, static_cast<std::uint32_t>(record.meta.n));
  put_u32le(out, static_cast<std::uint32_t>(record.meta.q));
  put_u32le(out, static_cast<std::uint32_t>(record.meta.mode));
  for (int k = 0; k < record.steps(); ++k) {
    for (int j = 0; j < record.meta.m; ++j) {
      put_f64le(out, record.frames(j, k));
    }
  }
  if (!out) {
    throw IoError("failed while writing " + path.string());
  }
}

ScanRecord load_scan_record(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open scan record " + path.string());
  }
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kRecordMagic) {
    throw IoError("bad magic in scan record " + path.string());
  }
  ScanMeta meta;
  meta.m = static_cast<int>(get_u32le(in, path));
  meta.n = static_cast<int>(get_u32le(in, path));
  meta.q = static_cast<int>(get_u32le(in, path));
  const std::uint32_t mode = get_u32le(in, path);
  if (mode != 1 && mode != 2) {
    throw IoError("bad mode " + std::to_string(mode) + " in scan record " + path.string());
  }
  meta.mode = static_cast<PatternMode>(mode);
  if (meta.m < 1 || meta.n < meta.m || meta.q < 1) {
    throw IoError("bad dimensions in scan record " + path.string());
  }
  const int steps = meta.q + meta.m - 1;
  Eigen::MatrixXd frames(meta.m, steps);
  for (int k = 0; k < steps; ++k) {
    for (int j = 0; j < meta.m; ++j) {
      frames(j, k) = get_f64le(in, path);
    }
  }
  return ScanRecord(std::move(frames), meta);
}

}  // namespace pbgi
